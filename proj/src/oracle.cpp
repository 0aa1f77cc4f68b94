#include "catbary/solver.hpp"

#include "model_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace catbary {

using Eigen::VectorXd;

namespace {

struct Cell {
    double a;
    double b;
    double value;
};

// Exact minimization over each tree edge. Along an edge (u, v) a point off
// the edge contributes u_j (s + d(u, p_j)) or u_j (L - s + d(v, p_j)); a point
// on it contributes u_j |s - o_j|. The minimum is at an endpoint, an on-edge
// offset, or a crossing of an increasing and a decreasing piece.
BarycenterResult tree_oracle(const WeightedPointSet& w, const TreeSpace& space) {
    const RTree& tree = space.tree();
    struct Piece {
        double slope;
        double intercept;
    };
    double best_value = std::numeric_limits<double>::infinity();
    TreePoint best{};
    std::size_t evaluations = 0;
    for (std::size_t e = 0; e < tree.edges().size(); ++e) {
        const RTree::Edge& ed = tree.edge(e);
        const TreePoint at_u = tree.vertex_point(ed.u);
        const TreePoint at_v = tree.vertex_point(ed.v);
        std::vector<Piece> pieces;
        std::vector<double> candidates{0.0, ed.length};
        for (std::size_t j = 0; j < w.points.size(); ++j) {
            const double u = w.weights[j];
            if (u == 0.0) continue;
            const TreePoint& p = as_tree(w.points[j]);
            if (p.edge == e) {
                pieces.push_back({u, -u * p.offset});
                pieces.push_back({-u, u * p.offset});
                candidates.push_back(p.offset);
                continue;
            }
            const double du = tree_distance(tree, at_u, p);
            const double dv = tree_distance(tree, at_v, p);
            if (du <= dv) pieces.push_back({u, u * du});
            else pieces.push_back({-u, u * (ed.length + dv)});
        }
        for (const Piece& inc : pieces) {
            if (inc.slope <= 0.0) continue;
            for (const Piece& dec : pieces) {
                if (dec.slope >= 0.0) continue;
                candidates.push_back((dec.intercept - inc.intercept) / (inc.slope - dec.slope));
            }
        }
        for (double s : candidates) {
            if (!(s >= 0.0 && s <= ed.length)) continue;
            double f = 0.0;
            for (const Piece& pc : pieces) f = std::max(f, pc.slope * s + pc.intercept);
            ++evaluations;
            if (f < best_value) {
                best_value = f;
                best = tree.point(e, s);
            }
        }
    }
    BarycenterResult r{best, objective(w, best), active_set(w, best), evaluations, 0.0, true};
    return r;
}

class ChartObjective {
public:
    ChartObjective(const WeightedPointSet& w, const ModelSpace& space, const ModelPoint& center)
        : kind_(space.kind()), k_(space.curvature()), center_(center.coords()) {
        scale_ = detail::curvature_scale(k_);
        basis_ = detail::tangent_basis(kind_, center_);
        for (std::size_t i = 0; i < w.points.size(); ++i) {
            if (w.weights[i] == 0.0) continue;
            points_.push_back(as_model(w.points[i]).coords());
            weights_.push_back(w.weights[i]);
            u_max_ = std::max(u_max_, w.weights[i]);
        }
    }

    VectorXd ambient(double a, double b) const {
        VectorXd v = basis_.col(0) * a;
        if (basis_.cols() > 1) v += basis_.col(1) * b;
        if (kind_ == ModelKind::euclidean) return center_ + v;
        const double len = std::sqrt(std::max(0.0, detail::form(kind_, v, v)));
        if (len == 0.0) return center_;
        const double theta = len * scale_;
        VectorXd y = kind_ == ModelKind::sphere ? VectorXd(std::cos(theta) * center_ + std::sin(theta) * (v / len))
                                                : VectorXd(std::cosh(theta) * center_ + std::sinh(theta) * (v / len));
        detail::normalize(kind_, y);
        return y;
    }

    double operator()(double a, double b) const {
        const VectorXd x = ambient(a, b);
        double f = 0.0;
        for (std::size_t i = 0; i < points_.size(); ++i) {
            f = std::max(f, weights_[i] * detail::unit_distance(kind_, x, points_[i]));
        }
        return f / scale_;
    }

    // Lipschitz constant of the objective in chart coordinates on the chart
    // ball of radius rho: the exponential chart stretches by at most
    // sinh(rho sqrt(-k)) / (rho sqrt(-k)) on H^n and not at all on S^n.
    double lipschitz(double rho) const {
        if (kind_ != ModelKind::hyperboloid || rho == 0.0) return u_max_;
        const double t = rho * scale_;
        return u_max_ * std::sinh(t) / t;
    }

    ModelPoint point(double a, double b) const { return ModelPoint(kind_, ambient(a, b)); }

private:
    ModelKind kind_;
    CurvatureParam k_;
    VectorXd center_;
    double scale_ = 1.0;
    Eigen::MatrixXd basis_;
    std::vector<VectorXd> points_;
    std::vector<double> weights_;
    double u_max_ = 0.0;
};

BarycenterResult model_oracle(const WeightedPointSet& w, const ModelSpace& space, const OracleBounds& bounds,
                              const OracleOptions& options) {
    const int dim = space.dim();
    const ModelPoint& center = as_model(bounds.center);
    const ChartObjective f(w, space, center);
    const double R = bounds.radius;
    const double L = f.lipschitz(R * std::sqrt(static_cast<double>(dim)));

    const std::size_t n0 = dim == 1 ? options.initial_cells_1d : options.initial_cells_2d;
    double h = 2.0 * R / static_cast<double>(n0);  // cell side
    std::vector<Cell> cells;
    double best_value = std::numeric_limits<double>::infinity();
    double best_a = 0.0;
    double best_b = 0.0;
    auto evaluate = [&](double a, double b) {
        const double v = f(a, b);
        if (v < best_value) {
            best_value = v;
            best_a = a;
            best_b = b;
        }
        return v;
    };
    for (std::size_t i = 0; i < n0; ++i) {
        const double a = -R + h * (static_cast<double>(i) + 0.5);
        if (dim == 1) {
            cells.push_back({a, 0.0, evaluate(a, 0.0)});
            continue;
        }
        for (std::size_t j = 0; j < n0; ++j) {
            const double b = -R + h * (static_cast<double>(j) + 0.5);
            cells.push_back({a, b, evaluate(a, b)});
        }
    }

    std::size_t levels = 0;
    const double half_diag_factor = 0.5 * std::sqrt(static_cast<double>(dim));
    while (true) {
        const double slack = L * h * half_diag_factor;
        std::vector<Cell> live;
        for (const Cell& c : cells) {
            if (c.value - slack <= best_value) live.push_back(c);
        }
        cells.swap(live);
        ++levels;
        if (h * half_diag_factor < options.min_cell_fraction * R) break;
        const std::size_t children = dim == 1 ? 2 : 4;
        if (cells.size() * children > options.max_live_cells) break;
        const double q = 0.25 * h;
        std::vector<Cell> next;
        next.reserve(cells.size() * children);
        for (const Cell& c : cells) {
            if (dim == 1) {
                next.push_back({c.a - q, 0.0, evaluate(c.a - q, 0.0)});
                next.push_back({c.a + q, 0.0, evaluate(c.a + q, 0.0)});
            } else {
                for (double da : {-q, q}) {
                    for (double db : {-q, q}) next.push_back({c.a + da, c.b + db, evaluate(c.a + da, c.b + db)});
                }
            }
        }
        cells.swap(next);
        h *= 0.5;
    }

    const SpacePoint best = f.point(best_a, best_b);
    BarycenterResult r{best, objective(w, best), active_set(w, best), levels, L * h * half_diag_factor, false};
    return r;
}

} // namespace

OracleBounds default_oracle_bounds(const WeightedPointSet& w) {
    std::vector<SpacePoint> support;
    for (std::size_t i = 0; i < w.points.size(); ++i) {
        if (w.weights[i] > 0.0) support.push_back(w.points[i]);
    }
    require(!support.empty(), ErrorCode::invalid_input, "all weights are zero");
    return OracleBounds{support.front(), diameter(*w.space, support)};
}

BarycenterResult oracle_grid(const WeightedPointSet& w, const std::optional<OracleBounds>& bounds,
                             const OracleOptions& options) {
    validate_weighted_set(w);
    if (const TreeSpace* tree = w.space->tree_structure()) return tree_oracle(w, *tree);

    const ModelSpace* model = dynamic_cast<const ModelSpace*>(w.space.get());
    require(model != nullptr && (model->dim() == 2 || (model->dim() == 1 && model->kind() == ModelKind::euclidean)),
            ErrorCode::unsupported, "grid oracle supports E^1, E^2, S^2, H^2 and trees only");

    const OracleBounds b = bounds ? *bounds : default_oracle_bounds(w);
    model->validate(b.center);
    require(std::isfinite(b.radius) && b.radius >= 0.0, ErrorCode::invalid_input, "oracle radius must be >= 0");
    if (b.radius == 0.0) {
        BarycenterResult r{b.center, objective(w, b.center), active_set(w, b.center), 0, 0.0, false};
        return r;
    }
    return model_oracle(w, *model, b, options);
}

} // namespace catbary
