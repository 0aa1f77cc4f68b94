#include "catbary/solver.hpp"

#include "active_set.hpp"
#include "model_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

namespace catbary {

namespace {

constexpr std::size_t kDescentIters = 1000;
constexpr int kRefineRounds = 8;
constexpr int kGoldenSteps = 80;

// Positive-weight points with exact duplicates merged (larger weight kept)
// and weights divided by their maximum.
struct Prepared {
    std::vector<SpacePoint> points;
    std::vector<double> weights;
    std::vector<std::size_t> origin;
    double weight_scale = 1.0;
};

SpacePoint canonical_point(const GeodesicSpace& space, const SpacePoint& p) {
    if (const TreeSpace* t = space.tree_structure()) return t->tree().canonical(as_tree(p));
    return p;
}

// Exact coordinates, so that only identical points are merged.
std::vector<double> point_key(const SpacePoint& p) {
    if (const auto* t = std::get_if<TreePoint>(&p)) return {static_cast<double>(t->edge), t->offset};
    const Eigen::VectorXd& c = std::get<ModelPoint>(p).coords();
    return std::vector<double>(c.data(), c.data() + c.size());
}

Prepared prepare(const WeightedPointSet& w) {
    Prepared out;
    std::map<std::vector<double>, std::size_t> seen;
    for (std::size_t i = 0; i < w.points.size(); ++i) {
        if (w.weights[i] == 0.0) continue;
        const SpacePoint p = canonical_point(*w.space, w.points[i]);
        const auto [it, fresh] = seen.emplace(point_key(p), out.points.size());
        if (!fresh) {
            out.weights[it->second] = std::max(out.weights[it->second], w.weights[i]);
            continue;
        }
        out.points.push_back(p);
        out.weights.push_back(w.weights[i]);
        out.origin.push_back(i);
    }
    out.weight_scale = *std::max_element(out.weights.begin(), out.weights.end());
    for (double& u : out.weights) u /= out.weight_scale;
    return out;
}

double prepared_objective(const GeodesicSpace& space, const Prepared& p, const SpacePoint& x, std::size_t* arg) {
    double best = -1.0;
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < p.points.size(); ++i) {
        const double f = p.weights[i] * space.distance(x, p.points[i]);
        if (f > best) {
            best = f;
            best_i = i;
        }
    }
    if (arg) *arg = best_i;
    return best;
}

struct Iterate {
    SpacePoint x;
    double value;
    std::size_t iterations = 0;
    double residual = std::numeric_limits<double>::infinity();
};

// Farthest-point geodesic descent with step 1/(j+2), keeping the best iterate.
void descend(const GeodesicSpace& space, const Prepared& p, Iterate& it, std::size_t budget) {
    SpacePoint x = it.x;
    std::size_t far = 0;
    prepared_objective(space, p, x, &far);
    for (std::size_t j = 0; j < budget; ++j) {
        x = space.geodesic_point(x, p.points[far], 1.0 / static_cast<double>(j + 2));
        const double v = prepared_objective(space, p, x, &far);
        ++it.iterations;
        if (v < it.value) {
            it.value = v;
            it.x = x;
        }
    }
}

// Golden-section line searches along the geodesic towards the current
// farthest point, until the displacement drops below tol.
void golden_refine(const GeodesicSpace& space, const Prepared& p, Iterate& it, double tol, std::size_t budget) {
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    for (std::size_t round = 0; round < budget; ++round) {
        std::size_t far = 0;
        prepared_objective(space, p, it.x, &far);
        const SpacePoint target = p.points[far];
        auto phi = [&](double t) { return prepared_objective(space, p, space.geodesic_point(it.x, target, t), nullptr); };
        double a = 0.0;
        double b = 1.0;
        double c = b - g * (b - a);
        double d = a + g * (b - a);
        double fc = phi(c);
        double fd = phi(d);
        for (int s = 0; s < kGoldenSteps && b - a > 1e-16; ++s) {
            if (fc <= fd) {
                b = d;
                d = c;
                fd = fc;
                c = b - g * (b - a);
                fc = phi(c);
            } else {
                a = c;
                c = d;
                fc = fd;
                d = a + g * (b - a);
                fd = phi(d);
            }
        }
        const double t = 0.5 * (a + b);
        const SpacePoint next = space.geodesic_point(it.x, target, t);
        const double v = prepared_objective(space, p, next, nullptr);
        ++it.iterations;
        if (!(v < it.value)) {
            it.residual = 0.0;
            return;
        }
        it.residual = space.distance(it.x, next);
        it.x = next;
        it.value = v;
        if (it.residual < tol) return;
    }
}

// ---------------------------------------------------------------------------
// Trees: exact line search along the path to the farthest point. On the arc
// x -> p*, d(gamma(s), p_j) = h_j + |s - s_j| with s_j the branch position.

bool tree_certified(const RTree& tree, const Prepared& p, const TreePoint& x, double value) {
    const RTree::Edge& ex = tree.edge(x.edge);
    const bool at_vertex = x.offset == 0.0 || x.offset == ex.length;
    const std::size_t w = x.offset == 0.0 ? ex.u : ex.v;
    std::optional<std::size_t> first;
    for (std::size_t i = 0; i < p.points.size(); ++i) {
        const TreePoint& q = as_tree(p.points[i]);
        const double f = p.weights[i] * tree_distance(tree, x, q);
        if (f < value * (1.0 - 1e-12)) continue;
        std::size_t dir = 0;
        if (!at_vertex) {
            if (q.edge == x.edge) {
                dir = q.offset < x.offset ? 0 : 1;
            } else {
                const double via_u = x.offset + tree_distance(tree, tree.vertex_point(ex.u), q);
                const double via_v = ex.length - x.offset + tree_distance(tree, tree.vertex_point(ex.v), q);
                dir = via_u < via_v ? 0 : 1;
            }
        } else {
            const RTree::Edge& eq = tree.edge(q.edge);
            if (eq.u == w || eq.v == w) {
                dir = q.edge;
            } else {
                const std::size_t c = tree.vertex_distance(w, eq.u) + q.offset <
                                              tree.vertex_distance(w, eq.v) + eq.length - q.offset
                                          ? eq.u
                                          : eq.v;
                dir = tree.next_edge(w, c);
            }
        }
        if (!first) first = dir;
        else if (*first != dir) return true;
    }
    return false;
}

void tree_search(const TreeSpace& space, const Prepared& p, Iterate& it, std::size_t budget) {
    for (std::size_t round = 0; round < budget; ++round) {
        std::size_t far = 0;
        prepared_objective(space, p, it.x, &far);
        const SpacePoint target = p.points[far];
        const double L = space.distance(it.x, target);
        if (L == 0.0) return;
        std::vector<double> s(p.points.size());
        std::vector<double> h(p.points.size());
        for (std::size_t j = 0; j < p.points.size(); ++j) {
            const double dj = space.distance(it.x, p.points[j]);
            const double ej = space.distance(target, p.points[j]);
            s[j] = std::clamp(0.5 * (dj + L - ej), 0.0, L);
            h[j] = std::max(0.0, dj - s[j]);
        }
        auto phi = [&](double v) {
            double f = 0.0;
            for (std::size_t j = 0; j < s.size(); ++j) f = std::max(f, p.weights[j] * (h[j] + std::abs(v - s[j])));
            return f;
        };
        // Convex piecewise-linear: the minimum sits at a breakpoint, i.e. an
        // endpoint, some s_j, or a crossing of two opposite-slope pieces.
        double best_s = 0.0;
        double best_f = phi(0.0);
        auto consider = [&](double v) {
            if (!(v > 0.0 && v <= L)) return;
            const double f = phi(v);
            if (f < best_f) {
                best_f = f;
                best_s = v;
            }
        };
        consider(L);
        for (std::size_t i = 0; i < s.size(); ++i) {
            consider(s[i]);
            for (std::size_t j = 0; j < s.size(); ++j) {
                // u_i (h_i + v - s_i) = u_j (h_j + s_j - v)
                const double ui = p.weights[i];
                const double uj = p.weights[j];
                consider((uj * (h[j] + s[j]) - ui * (h[i] - s[i])) / (ui + uj));
            }
        }
        ++it.iterations;
        if (!(best_f < it.value * (1.0 - 1e-15)) || best_s == 0.0) return;
        const SpacePoint next = space.geodesic_point(it.x, target, std::min(1.0, best_s / L));
        const double v = prepared_objective(space, p, next, nullptr);
        if (!(v < it.value)) return;
        it.residual = space.distance(it.x, next);
        it.x = next;
        it.value = v;
    }
}

// ---------------------------------------------------------------------------

ModelPoint from_unit(const ModelSpace& space, const Eigen::VectorXd& x) {
    Eigen::VectorXd y = x;
    detail::normalize(space.kind(), y);
    return ModelPoint(space.kind(), std::move(y));
}

BarycenterResult finish(const WeightedPointSet& w, const SpacePoint& x, std::size_t iterations, double residual,
                        bool certified) {
    BarycenterResult r{x, objective(w, x), active_set(w, x), iterations, residual, certified};
    return r;
}

} // namespace

WeightedPointSet unit_weights(SpacePtr space, std::vector<SpacePoint> points) {
    std::vector<double> weights(points.size(), 1.0);
    return WeightedPointSet{std::move(space), std::move(points), std::move(weights)};
}

double objective(const WeightedPointSet& w, const SpacePoint& x) {
    const std::size_t i = farthest_index(w, x);
    return w.weights[i] * w.space->distance(x, w.points[i]);
}

std::size_t farthest_index(const WeightedPointSet& w, const SpacePoint& x) {
    require(!w.points.empty() && w.points.size() == w.weights.size(), ErrorCode::invalid_input,
            "weighted point set must be non-empty with parallel weights");
    std::size_t best = 0;
    double best_value = -1.0;
    for (std::size_t i = 0; i < w.points.size(); ++i) {
        const double f = w.weights[i] * w.space->distance(x, w.points[i]);
        if (f > best_value) {
            best_value = f;
            best = i;
        }
    }
    return best;
}

std::vector<std::size_t> active_set(const WeightedPointSet& w, const SpacePoint& x) {
    std::vector<double> f(w.points.size());
    double top = 0.0;
    for (std::size_t i = 0; i < w.points.size(); ++i) {
        f[i] = w.weights[i] * w.space->distance(x, w.points[i]);
        top = std::max(top, f[i]);
    }
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (w.weights[i] > 0.0 && f[i] >= top * (1.0 - kActivityTol)) out.push_back(i);
    }
    return out;
}

double diameter(const GeodesicSpace& space, const std::vector<SpacePoint>& points) {
    double d = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) d = std::max(d, space.distance(points[i], points[j]));
    }
    return d;
}

void validate_weighted_set(const WeightedPointSet& w) {
    require(w.space != nullptr, ErrorCode::invalid_input, "weighted point set has no space");
    require(!w.points.empty(), ErrorCode::invalid_input, "weighted point set is empty");
    require(w.points.size() == w.weights.size(), ErrorCode::invalid_input,
            "points and weights must have the same length");
    bool any_positive = false;
    std::vector<SpacePoint> support;
    std::vector<double> support_weights;
    for (std::size_t i = 0; i < w.points.size(); ++i) {
        require(std::isfinite(w.weights[i]) && w.weights[i] >= 0.0, ErrorCode::invalid_input,
                "weight " + std::to_string(i) + " must be finite and non-negative");
        try {
            w.space->validate(w.points[i]);
        } catch (const Error& e) {
            fail(ErrorCode::invalid_input, "point " + std::to_string(i) + ": " + e.what());
        }
        if (w.weights[i] > 0.0) {
            any_positive = true;
            support.push_back(w.points[i]);
            support_weights.push_back(w.weights[i]);
        }
    }
    require(any_positive, ErrorCode::invalid_input, "all weights are zero");

    const CurvatureParam k = w.space->curvature();
    if (k.positive()) {
        const bool constant = std::all_of(support_weights.begin(), support_weights.end(),
                                          [&](double u) { return u == support_weights.front(); });
        const double bound = constant ? 0.5 * k.d_cap() : 0.25 * k.d_cap();
        const double diam = diameter(*w.space, support);
        require(diam < bound, ErrorCode::diameter_bound,
                "diameter " + std::to_string(diam) + " of the weighted points is not below " +
                    (constant ? std::string("D_k/2") : std::string("D_k/4")) + " = " + std::to_string(bound));
    }
}

BarycenterResult barycenter(const WeightedPointSet& w, double tol, std::size_t max_iter) {
    require(std::isfinite(tol) && tol > 0.0, ErrorCode::invalid_input, "tol must be positive");
    require(max_iter >= 1, ErrorCode::invalid_input, "max_iter must be positive");
    validate_weighted_set(w);
    const GeodesicSpace& space = *w.space;
    const Prepared p = prepare(w);
    if (p.points.size() == 1) return finish(w, p.points[0], 0, 0.0, true);

    Iterate it{space.initial_center(p.points, p.weights), 0.0};
    it.value = prepared_objective(space, p, it.x, nullptr);

    if (const TreeSpace* tree = space.tree_structure()) {
        tree_search(*tree, p, it, max_iter);
        const bool ok = tree_certified(tree->tree(), p, tree->tree().canonical(as_tree(it.x)), it.value);
        if (!ok && it.iterations >= max_iter) {
            throw NonConvergence("tree search exhausted max_iter", finish(w, it.x, it.iterations, it.residual, false));
        }
        return finish(w, it.x, it.iterations, ok ? 0.0 : it.residual, ok);
    }

    const std::size_t descent = std::min(kDescentIters, max_iter / 2);
    descend(space, p, it, descent);
    golden_refine(space, p, it, tol, max_iter - it.iterations);

    const ModelSpace* model = space.model_structure();
    if (model == nullptr) {
        if (it.residual > tol) {
            throw NonConvergence("barycenter iteration exhausted max_iter",
                                 finish(w, it.x, it.iterations, it.residual, false));
        }
        return finish(w, it.x, it.iterations, it.residual, false);
    }

    std::vector<Eigen::VectorXd> coords;
    coords.reserve(p.points.size());
    for (const SpacePoint& q : p.points) coords.push_back(as_model(q).coords());
    for (int round = 0; round < kRefineRounds; ++round) {
        const auto out =
            detail::refine_active_set(model->kind(), model->dim(), coords, p.weights, as_model(it.x).coords());
        it.iterations += out.solves;
        const ModelPoint candidate = from_unit(*model, out.x);
        if (out.certified) {
            if (!space.contains(candidate)) break;
            return finish(w, candidate, it.iterations, out.residual, true);
        }
        const double v = prepared_objective(space, p, candidate, nullptr);
        if (v < it.value) {
            it.x = candidate;
            it.value = v;
        }
        if (it.iterations >= max_iter) break;
        golden_refine(space, p, it, tol, std::min<std::size_t>(200, max_iter - std::min(max_iter, it.iterations)));
        descend(space, p, it, std::min<std::size_t>(200, max_iter - std::min(max_iter, it.iterations)));
    }
    if (it.residual > tol) {
        throw NonConvergence("barycenter iteration exhausted max_iter without a certificate",
                             finish(w, it.x, it.iterations, it.residual, false));
    }
    return finish(w, it.x, it.iterations, it.residual, false);
}

BarycenterResult circumcenter(SpacePtr space, const std::vector<SpacePoint>& points, double tol,
                              std::size_t max_iter) {
    return barycenter(unit_weights(std::move(space), points), tol, max_iter);
}

BarycenterResult barycenter_pow(const WeightedPointSet& w, double t, double tol, std::size_t max_iter) {
    require(std::isfinite(t) && t > 0.0, ErrorCode::invalid_input, "exponent t must be positive");
    if (t == 1.0) return barycenter(w, tol, max_iter);
    WeightedPointSet root = w;
    for (double& u : root.weights) {
        require(std::isfinite(u) && u >= 0.0, ErrorCode::invalid_input, "weights must be finite and non-negative");
        u = std::pow(u, 1.0 / t);
    }
    BarycenterResult r = barycenter(root, tol, max_iter);
    r.baryradius = std::pow(r.baryradius, t);
    return r;
}

} // namespace catbary
