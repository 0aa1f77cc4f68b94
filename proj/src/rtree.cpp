#include "catbary/error.hpp"
#include "catbary/geodesic_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

namespace catbary {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

} // namespace

RTree::RTree(std::size_t vertex_count, std::vector<Edge> edges, std::vector<std::string> names)
    : vertex_count_(vertex_count), edges_(std::move(edges)), names_(std::move(names)), incident_(vertex_count) {
    require(vertex_count_ >= 2, ErrorCode::invalid_input, "tree needs at least two vertices");
    require(edges_.size() + 1 == vertex_count_, ErrorCode::invalid_input,
            "tree must have exactly |vertices| - 1 edges");
    if (names_.empty()) {
        for (std::size_t v = 0; v < vertex_count_; ++v) names_.push_back(std::to_string(v));
    }
    require(names_.size() == vertex_count_, ErrorCode::invalid_input, "vertex name list has wrong length");
    for (std::size_t e = 0; e < edges_.size(); ++e) {
        const Edge& ed = edges_[e];
        require(ed.u < vertex_count_ && ed.v < vertex_count_ && ed.u != ed.v, ErrorCode::invalid_input,
                "edge " + std::to_string(e) + " has invalid endpoints");
        require(std::isfinite(ed.length) && ed.length > 0.0, ErrorCode::invalid_input,
                "edge " + std::to_string(e) + " must have positive finite length");
        incident_[ed.u].push_back(e);
        incident_[ed.v].push_back(e);
    }

    const std::size_t n = vertex_count_;
    dist_.assign(n * n, std::numeric_limits<double>::infinity());
    next_.assign(n * n, kNone);
    for (std::size_t src = 0; src < n; ++src) {
        // BFS from src; next_[w * n + src] is the edge from w back towards src.
        std::queue<std::size_t> queue;
        dist_[src * n + src] = 0.0;
        queue.push(src);
        while (!queue.empty()) {
            const std::size_t w = queue.front();
            queue.pop();
            for (std::size_t e : incident_[w]) {
                const std::size_t o = opposite(e, w);
                if (std::isfinite(dist_[src * n + o])) continue;
                dist_[src * n + o] = dist_[src * n + w] + edges_[e].length;
                next_[o * n + src] = e;
                queue.push(o);
            }
        }
        for (std::size_t v = 0; v < n; ++v) {
            require(std::isfinite(dist_[src * n + v]), ErrorCode::invalid_input, "tree graph is not connected");
        }
    }
}

const RTree::Edge& RTree::edge(std::size_t id) const {
    require(id < edges_.size(), ErrorCode::invalid_input, "edge id " + std::to_string(id) + " out of range");
    return edges_[id];
}

std::size_t RTree::vertex_index(const std::string& name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    require(it != names_.end(), ErrorCode::invalid_input, "unknown vertex '" + name + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

std::size_t RTree::opposite(std::size_t e, std::size_t v) const {
    const Edge& ed = edges_[e];
    return ed.u == v ? ed.v : ed.u;
}

TreePoint RTree::vertex_point(std::size_t v) const {
    require(v < vertex_count_, ErrorCode::invalid_input, "vertex id out of range");
    const std::size_t e = *std::min_element(incident_[v].begin(), incident_[v].end());
    return TreePoint{e, edges_[e].u == v ? 0.0 : edges_[e].length};
}

void RTree::validate(const TreePoint& p) const {
    require(p.edge < edges_.size(), ErrorCode::invalid_input, "tree point refers to unknown edge");
    require(std::isfinite(p.offset) && p.offset >= 0.0 && p.offset <= edges_[p.edge].length,
            ErrorCode::invalid_input, "tree point offset outside [0, edge length]");
}

TreePoint RTree::canonical(const TreePoint& p) const {
    validate(p);
    const Edge& ed = edges_[p.edge];
    if (p.offset == 0.0) return vertex_point(ed.u);
    if (p.offset == ed.length) return vertex_point(ed.v);
    return p;
}

TreePoint RTree::point(std::size_t e, double offset) const { return canonical(TreePoint{e, offset}); }

double tree_distance(const RTree& tree, const TreePoint& p, const TreePoint& q) {
    tree.validate(p);
    tree.validate(q);
    if (p.edge == q.edge) return std::abs(p.offset - q.offset);
    const RTree::Edge& ep = tree.edge(p.edge);
    const RTree::Edge& eq = tree.edge(q.edge);
    const double p_ends[2] = {p.offset, ep.length - p.offset};
    const double q_ends[2] = {q.offset, eq.length - q.offset};
    const std::size_t pv[2] = {ep.u, ep.v};
    const std::size_t qv[2] = {eq.u, eq.v};
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            best = std::min(best, p_ends[i] + tree.vertex_distance(pv[i], qv[j]) + q_ends[j]);
        }
    }
    return best;
}

namespace {

// Point at arc length s from vertex v along edge e.
TreePoint along_edge(const RTree& tree, std::size_t e, std::size_t from, double s) {
    const RTree::Edge& ed = tree.edge(e);
    s = std::clamp(s, 0.0, ed.length);
    return tree.point(e, ed.u == from ? s : ed.length - s);
}

} // namespace

TreePoint tree_geodesic_point(const RTree& tree, const TreePoint& p, const TreePoint& q, double t) {
    require(std::isfinite(t) && t >= 0.0 && t <= 1.0, ErrorCode::invalid_input, "geodesic parameter outside [0, 1]");
    const double total = tree_distance(tree, p, q);
    if (t == 0.0 || total == 0.0) return tree.canonical(p);
    if (t == 1.0) return tree.canonical(q);
    if (p.edge == q.edge) return tree.point(p.edge, p.offset + t * (q.offset - p.offset));

    const double target = t * total;
    const RTree::Edge& ep = tree.edge(p.edge);
    const RTree::Edge& eq = tree.edge(q.edge);
    // Pick the exit vertex of p's edge and entry vertex of q's edge on the arc.
    std::size_t exit = ep.u;
    std::size_t entry = eq.u;
    double exit_len = p.offset;
    double entry_len = q.offset;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 2; ++i) {
        const std::size_t a = i == 0 ? ep.u : ep.v;
        const double la = i == 0 ? p.offset : ep.length - p.offset;
        for (int j = 0; j < 2; ++j) {
            const std::size_t b = j == 0 ? eq.u : eq.v;
            const double lb = j == 0 ? q.offset : eq.length - q.offset;
            const double len = la + tree.vertex_distance(a, b) + lb;
            if (len < best) {
                best = len;
                exit = a;
                entry = b;
                exit_len = la;
                entry_len = lb;
            }
        }
    }

    if (target <= exit_len) {
        return tree.point(p.edge, exit == ep.u ? p.offset - target : p.offset + target);
    }
    double walked = exit_len;
    std::size_t w = exit;
    while (w != entry) {
        const std::size_t e = tree.next_edge(w, entry);
        const double len = tree.edge(e).length;
        if (target <= walked + len) return along_edge(tree, e, w, target - walked);
        walked += len;
        w = tree.opposite(e, w);
    }
    const double rest = std::clamp(target - walked, 0.0, entry_len);
    return tree.point(q.edge, entry == eq.u ? rest : q.offset + (entry_len - rest));
}

} // namespace catbary
