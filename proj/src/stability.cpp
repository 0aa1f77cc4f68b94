#include "catbary/stability.hpp"

#include "catbary/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace catbary {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kMatchTol = 1e-9;

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

MatrixXd minkowski_gram(Eigen::Index n) {
    MatrixXd J = MatrixXd::Identity(n, n);
    J(n - 1, n - 1) = -1.0;
    return J;
}

std::size_t mapped_edge(const RTree& tree, const TreeAutomorphism& g, std::size_t e) {
    const RTree::Edge& ed = tree.edge(e);
    const std::size_t a = g.vertex_map[ed.u];
    const std::size_t b = g.vertex_map[ed.v];
    for (std::size_t f : tree.incident(a)) {
        if (tree.opposite(f, a) == b) return f;
    }
    fail(ErrorCode::invalid_input, "vertex map does not send edge " + std::to_string(e) + " to an edge");
}

void require_same_points(const WeightedPointSet& a, const WeightedPointSet& b) {
    require(a.space == b.space && a.points.size() == b.points.size() && a.weights.size() == b.weights.size(),
            ErrorCode::invalid_input, "weighted sets must share the same space and point list");
    for (std::size_t i = 0; i < a.points.size(); ++i) {
        require(a.points[i] == b.points[i], ErrorCode::invalid_input,
                "weighted sets differ at point " + std::to_string(i));
    }
}

double circumradius(const WeightedPointSet& w) { return circumcenter(w.space, w.points).baryradius; }

} // namespace

void validate_delta_function(const GeodesicSpace& space, const DeltaFunction& f) {
    require(f.domain.size() == f.images.size(), ErrorCode::invalid_input,
            "delta-function domain and images must have the same length");
    require(std::isfinite(f.delta) && f.delta > 0.0, ErrorCode::invalid_input, "delta must be positive");
    for (std::size_t i = 0; i < f.domain.size(); ++i) {
        space.validate(f.images[i]);
        const double d = space.distance(f.domain[i], f.images[i]);
        require(d < f.delta, ErrorCode::invalid_input,
                "point " + std::to_string(i) + " moves by " + std::to_string(d) + " >= delta");
    }
}

void validate_isometry(const GeodesicSpace& space, const IsometryDescription& g) {
    std::visit(overloaded{
                   [&](const EuclideanMotion& m) {
                       const ModelSpace* model = space.model_structure();
                       require(model && model->kind() == ModelKind::euclidean, ErrorCode::invalid_input,
                               "Euclidean motion needs a Euclidean space");
                       const auto n = model->dim();
                       require(m.rotation.rows() == n && m.rotation.cols() == n && m.translation.size() == n,
                               ErrorCode::invalid_input, "Euclidean motion has wrong dimensions");
                       require((m.rotation.transpose() * m.rotation - MatrixXd::Identity(n, n)).norm() <= kMatchTol,
                               ErrorCode::invalid_input, "rotation matrix is not orthogonal");
                   },
                   [&](const SphereRotation& m) {
                       const ModelSpace* model = space.model_structure();
                       require(model && model->kind() == ModelKind::sphere, ErrorCode::invalid_input,
                               "sphere rotation needs a sphere");
                       const auto n = model->dim() + 1;
                       require(m.matrix.rows() == n && m.matrix.cols() == n, ErrorCode::invalid_input,
                               "sphere rotation has wrong dimensions");
                       require((m.matrix.transpose() * m.matrix - MatrixXd::Identity(n, n)).norm() <= kMatchTol,
                               ErrorCode::invalid_input, "sphere map is not orthogonal");
                   },
                   [&](const HyperbolicIsometry& m) {
                       const ModelSpace* model = space.model_structure();
                       require(model && model->kind() == ModelKind::hyperboloid, ErrorCode::invalid_input,
                               "hyperbolic isometry needs a hyperbolic space");
                       const auto n = model->dim() + 1;
                       require(m.matrix.rows() == n && m.matrix.cols() == n, ErrorCode::invalid_input,
                               "hyperbolic isometry has wrong dimensions");
                       const MatrixXd J = minkowski_gram(n);
                       require((m.matrix.transpose() * J * m.matrix - J).norm() <= kMatchTol * m.matrix.squaredNorm(),
                               ErrorCode::invalid_input, "matrix does not preserve the Minkowski form");
                       require(m.matrix(n - 1, n - 1) > 0.0, ErrorCode::invalid_input,
                               "matrix swaps the hyperboloid sheets");
                   },
                   [&](const TreeAutomorphism& m) {
                       const TreeSpace* ts = space.tree_structure();
                       require(ts != nullptr, ErrorCode::invalid_input, "tree automorphism needs a tree");
                       const RTree& tree = ts->tree();
                       require(m.vertex_map.size() == tree.vertex_count(), ErrorCode::invalid_input,
                               "vertex map has wrong length");
                       std::vector<std::size_t> sorted = m.vertex_map;
                       std::sort(sorted.begin(), sorted.end());
                       for (std::size_t v = 0; v < sorted.size(); ++v) {
                           require(sorted[v] == v, ErrorCode::invalid_input, "vertex map is not a permutation");
                       }
                       for (std::size_t e = 0; e < tree.edges().size(); ++e) {
                           const std::size_t f = mapped_edge(tree, m, e);
                           require(std::abs(tree.edge(f).length - tree.edge(e).length) <= kMatchTol,
                                   ErrorCode::invalid_input, "vertex map changes an edge length");
                       }
                   },
               },
               g);
}

SpacePoint apply_isometry(const GeodesicSpace& space, const IsometryDescription& g, const SpacePoint& x) {
    return std::visit(overloaded{
                          [&](const EuclideanMotion& m) -> SpacePoint {
                              return euclidean_point(m.rotation * as_model(x).coords() + m.translation);
                          },
                          [&](const SphereRotation& m) -> SpacePoint {
                              return sphere_point(m.matrix * as_model(x).coords());
                          },
                          [&](const HyperbolicIsometry& m) -> SpacePoint {
                              return hyperboloid_point(m.matrix * as_model(x).coords());
                          },
                          [&](const TreeAutomorphism& m) -> SpacePoint {
                              const TreeSpace* ts = space.tree_structure();
                              require(ts != nullptr, ErrorCode::invalid_input, "tree automorphism needs a tree");
                              const RTree& tree = ts->tree();
                              const TreePoint& p = as_tree(x);
                              const std::size_t f = mapped_edge(tree, m, p.edge);
                              const bool same_orientation = tree.edge(f).u == m.vertex_map[tree.edge(p.edge).u];
                              const double len = tree.edge(f).length;
                              return tree.point(f, same_orientation ? std::min(p.offset, len)
                                                                    : std::max(0.0, len - p.offset));
                          },
                      },
                      g);
}

double isometry_defect(const GeodesicSpace& space, const IsometryDescription& g,
                       const std::vector<SpacePoint>& points) {
    std::vector<SpacePoint> images;
    images.reserve(points.size());
    for (const SpacePoint& p : points) images.push_back(apply_isometry(space, g, p));
    double worst = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            worst = std::max(worst, std::abs(space.distance(images[i], images[j]) - space.distance(points[i], points[j])));
        }
    }
    return worst;
}

CheckRecord radius_lipschitz_check(const WeightedPointSet& w, const WeightedPointSet& w_prime, double delta) {
    require_same_points(w, w_prime);
    require(std::isfinite(delta) && delta > 0.0, ErrorCode::invalid_input, "delta must be positive");
    double gap_u = 0.0;
    for (std::size_t i = 0; i < w.weights.size(); ++i) gap_u = std::max(gap_u, std::abs(w.weights[i] - w_prime.weights[i]));
    require(gap_u < delta, ErrorCode::invalid_input, "sup |u - u'| is not below delta");

    const double r = barycenter(w).baryradius;
    const double r_prime = barycenter(w_prime).baryradius;
    const double r1 = circumradius(w);
    CheckRecord rec;
    rec.suite = "radius-lipschitz";
    rec.bound = 2.0 * r1 * delta;
    rec.measured = std::abs(r - r_prime);
    rec.pass = rec.measured <= rec.bound + 1e-9;
    rec.with("r_u", r).with("r_u_prime", r_prime).with("r_1", r1).with("delta", delta);
    return rec;
}

CheckRecord barycenter_continuity_check(const WeightedPointSet& w, double epsilon, const ContinuityOptions& options) {
    require(std::isfinite(epsilon) && epsilon > 0.0, ErrorCode::invalid_input, "epsilon must be positive");
    const SpacePoint q = barycenter(w).barycenter;
    const double u_max = *std::max_element(w.weights.begin(), w.weights.end());

    // Largest displacement over seeded perturbations of sup-norm below delta.
    auto probe = [&](double delta) {
        Rng rng(options.seed);
        double worst = 0.0;
        for (std::size_t t = 0; t < options.trials; ++t) {
            WeightedPointSet p = w;
            bool positive = false;
            for (double& u : p.weights) {
                u = std::max(0.0, u + delta * (1.0 - 1e-12) * (2.0 * rng.uniform() - 1.0));
                positive = positive || u > 0.0;
            }
            if (!positive) continue;
            worst = std::max(worst, w.space->distance(q, barycenter(p).barycenter));
        }
        return worst;
    };

    double delta = 0.5 * u_max;
    double shift = probe(delta);
    double failing = 0.0;
    while (!(shift < epsilon) && delta >= options.floor) {
        failing = delta;
        delta *= 0.5;
        shift = probe(delta);
    }
    const bool found = shift < epsilon && delta >= options.floor;
    if (found && failing > 0.0) {
        double lo = delta;
        double hi = failing;
        for (std::size_t s = 0; s < options.bisection_steps; ++s) {
            const double mid = 0.5 * (lo + hi);
            const double m = probe(mid);
            if (m < epsilon) {
                lo = mid;
                shift = m;
            } else {
                hi = mid;
            }
        }
        delta = lo;
    }

    CheckRecord rec;
    rec.suite = "continuity";
    rec.bound = epsilon;
    rec.measured = shift;
    rec.pass = found;
    rec.with("delta", delta).with("epsilon", epsilon);
    if (!found) rec.note = "bisection reached the delta floor";
    return rec;
}

CheckRecord point_perturbation_check(const WeightedPointSet& w, const DeltaFunction& f) {
    validate_delta_function(*w.space, f);
    require(f.domain.size() == w.points.size(), ErrorCode::invalid_input, "delta-function domain must be P");
    for (std::size_t i = 0; i < w.points.size(); ++i) {
        require(f.domain[i] == w.points[i], ErrorCode::invalid_input,
                "delta-function domain differs from P at point " + std::to_string(i));
    }
    const BarycenterResult base = barycenter(w);
    // Coinciding images are merged by the solver keeping the larger weight.
    const WeightedPointSet moved{w.space, f.images, w.weights};
    const BarycenterResult after = barycenter(moved);
    const double u_max = *std::max_element(w.weights.begin(), w.weights.end());

    CheckRecord rec;
    rec.suite = "point-perturbation";
    rec.bound = u_max * f.delta;
    rec.measured = std::abs(base.baryradius - after.baryradius);
    rec.pass = rec.measured <= rec.bound + 1e-9;
    rec.with("delta", f.delta).with("displacement", w.space->distance(base.barycenter, after.barycenter));
    return rec;
}

CheckRecord fixed_point_check(const WeightedPointSet& w, const std::vector<IsometryDescription>& group, double tol) {
    require(!group.empty(), ErrorCode::invalid_input, "isometry group is empty");
    validate_weighted_set(w);
    for (const IsometryDescription& g : group) {
        validate_isometry(*w.space, g);
        for (std::size_t i = 0; i < w.points.size(); ++i) {
            const SpacePoint image = apply_isometry(*w.space, g, w.points[i]);
            bool matched = false;
            for (std::size_t j = 0; j < w.points.size() && !matched; ++j) {
                matched = w.space->distance(image, w.points[j]) <= kMatchTol &&
                          std::abs(w.weights[i] - w.weights[j]) <= kMatchTol * std::max(1.0, w.weights[i]);
            }
            require(matched, ErrorCode::hypothesis_violation,
                    "point " + std::to_string(i) + " is not mapped onto a point of equal weight");
        }
    }
    const SpacePoint q = barycenter(w, tol).barycenter;
    double displacement = 0.0;
    for (const IsometryDescription& g : group) {
        displacement = std::max(displacement, w.space->distance(apply_isometry(*w.space, g, q), q));
    }
    CheckRecord rec;
    rec.suite = "fixed-point";
    rec.bound = 10.0 * tol;
    rec.measured = displacement;
    rec.pass = displacement <= rec.bound;
    rec.with("group_size", static_cast<double>(group.size()));
    if (w.space->curvature().k() != 0.0) rec.note = "extrapolation: k != 0";
    return rec;
}

CheckRecord fixed_point_check(const WeightedPointSet& w, const IsometryDescription& g, double tol) {
    return fixed_point_check(w, std::vector<IsometryDescription>{g}, tol);
}

CheckRecord jung_verify(const std::vector<Eigen::VectorXd>& points) {
    require(!points.empty(), ErrorCode::invalid_input, "Jung check needs points");
    const auto n = points.front().size();
    require(n >= 1 && n <= 3, ErrorCode::invalid_input, "Jung check supports E^1, E^2, E^3");
    auto space = ModelSpace::euclidean(static_cast<int>(n));
    std::vector<SpacePoint> pts;
    for (const VectorXd& p : points) pts.push_back(space->point(p));
    const double r1 = circumcenter(space, pts).baryradius;
    const double diam = diameter(*space, pts);
    const double nd = static_cast<double>(n);
    CheckRecord rec;
    rec.suite = "jung";
    rec.bound = std::sqrt(nd / (2.0 * (nd + 1.0))) * diam;
    rec.measured = r1;
    rec.pass = r1 <= rec.bound + 1e-9;
    rec.with("diameter", diam).with("dimension", nd);
    if (r1 >= rec.bound - 1e-6) rec.note = "near equality";
    return rec;
}

} // namespace catbary
