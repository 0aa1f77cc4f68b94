#include "catbary/geodesic_spaces.hpp"

#include "catbary/error.hpp"
#include "model_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace catbary {

using Eigen::VectorXd;

const ModelPoint& as_model(const SpacePoint& x) {
    const auto* p = std::get_if<ModelPoint>(&x);
    require(p != nullptr, ErrorCode::invalid_input, "expected a model-space point");
    return *p;
}

const TreePoint& as_tree(const SpacePoint& x) {
    const auto* p = std::get_if<TreePoint>(&x);
    require(p != nullptr, ErrorCode::invalid_input, "expected a tree point");
    return *p;
}

bool GeodesicSpace::contains(const SpacePoint& x) const {
    try {
        validate(x);
        return true;
    } catch (const Error&) {
        return false;
    }
}

SpacePoint GeodesicSpace::initial_center(std::span<const SpacePoint> points, std::span<const double> weights) const {
    require(!points.empty(), ErrorCode::invalid_input, "no points");
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points.size(); ++i) {
        double f = 0.0;
        for (std::size_t j = 0; j < points.size(); ++j) f = std::max(f, weights[j] * distance(points[i], points[j]));
        if (f < best_value) {
            best_value = f;
            best = i;
        }
    }
    return points[best];
}

// ---------------------------------------------------------------------------

ModelSpace::ModelSpace(int dim, CurvatureParam k) : dim_(dim), k_(k) {
    require(dim >= 1, ErrorCode::invalid_input, "model space dimension must be positive");
}

std::shared_ptr<const ModelSpace> ModelSpace::euclidean(int dim) {
    return std::make_shared<const ModelSpace>(dim, CurvatureParam(0.0));
}

std::shared_ptr<const ModelSpace> ModelSpace::sphere(int dim, double k) {
    require(k > 0.0, ErrorCode::invalid_input, "sphere curvature must be positive");
    return std::make_shared<const ModelSpace>(dim, CurvatureParam(k));
}

std::shared_ptr<const ModelSpace> ModelSpace::hyperbolic(int dim, double k) {
    require(k < 0.0, ErrorCode::invalid_input, "hyperbolic curvature must be negative");
    return std::make_shared<const ModelSpace>(dim, CurvatureParam(k));
}

ModelPoint ModelSpace::point(VectorXd coords) const {
    const auto expected = kind() == ModelKind::euclidean ? dim_ : dim_ + 1;
    require(coords.size() == expected, ErrorCode::invalid_input,
            "expected " + std::to_string(expected) + " coordinates, got " + std::to_string(coords.size()));
    return ModelPoint(kind(), std::move(coords));
}

std::string ModelSpace::name() const {
    const std::string n = std::to_string(dim_);
    switch (kind()) {
    case ModelKind::euclidean:
        return "E" + n;
    case ModelKind::sphere:
        return "S" + n + "(k=" + std::to_string(k_.k()) + ")";
    case ModelKind::hyperboloid:
        return "H" + n + "(k=" + std::to_string(k_.k()) + ")";
    }
    return "M";
}

void ModelSpace::validate(const SpacePoint& x) const {
    const ModelPoint& p = as_model(x);
    require(p.kind() == kind() && p.dim() == dim_, ErrorCode::invalid_input,
            "point does not belong to " + name());
}

double ModelSpace::distance(const SpacePoint& x, const SpacePoint& y) const {
    return model_distance(k_, as_model(x), as_model(y));
}

SpacePoint ModelSpace::geodesic_point(const SpacePoint& x, const SpacePoint& y, double t) const {
    return catbary::geodesic_point(k_, as_model(x), as_model(y), t);
}

SpacePoint ModelSpace::initial_center(std::span<const SpacePoint> points, std::span<const double> weights) const {
    require(!points.empty(), ErrorCode::invalid_input, "no points");
    VectorXd mean = VectorXd::Zero(as_model(points[0]).coords().size());
    double total = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        mean += weights[i] * as_model(points[i]).coords();
        total += weights[i];
    }
    mean /= total;
    if (!detail::normalize(kind(), mean)) return GeodesicSpace::initial_center(points, weights);
    return ModelPoint(kind(), std::move(mean));
}

SpacePoint ModelSpace::sample_near(const SpacePoint& center, double radius, Rng& rng) const {
    const ModelPoint& c = as_model(center);
    const Eigen::MatrixXd basis = detail::tangent_basis(kind(), c.coords());
    VectorXd dir(basis.cols());
    for (Eigen::Index i = 0; i < dir.size(); ++i) dir[i] = rng.normal();
    const double n = dir.norm();
    if (n == 0.0) return center;
    const double rho = radius * std::pow(rng.uniform(), 1.0 / static_cast<double>(dim_));
    return exp_map(k_, c, basis * (dir * (rho / n)));
}

// ---------------------------------------------------------------------------

TreeSpace::TreeSpace(RTree tree, std::string label) : tree_(std::move(tree)), label_(std::move(label)) {}

void TreeSpace::validate(const SpacePoint& x) const { tree_.validate(as_tree(x)); }

double TreeSpace::distance(const SpacePoint& x, const SpacePoint& y) const {
    return tree_distance(tree_, as_tree(x), as_tree(y));
}

SpacePoint TreeSpace::geodesic_point(const SpacePoint& x, const SpacePoint& y, double t) const {
    return tree_geodesic_point(tree_, as_tree(x), as_tree(y), t);
}

SpacePoint TreeSpace::initial_center(std::span<const SpacePoint> points, std::span<const double> weights) const {
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t v = 0; v < tree_.vertex_count(); ++v) {
        const TreePoint x = tree_.vertex_point(v);
        double f = 0.0;
        for (std::size_t j = 0; j < points.size(); ++j) {
            f = std::max(f, weights[j] * tree_distance(tree_, x, as_tree(points[j])));
        }
        if (f < best_value) {
            best_value = f;
            best = v;
        }
    }
    return tree_.vertex_point(best);
}

SpacePoint TreeSpace::sample_near(const SpacePoint& center, double radius, Rng& rng) const {
    const TreePoint& c = as_tree(center);
    for (int attempt = 0; attempt < 1000; ++attempt) {
        const std::size_t e = rng.index(tree_.edges().size());
        const TreePoint p = tree_.point(e, rng.uniform(0.0, tree_.edge(e).length));
        if (tree_distance(tree_, c, p) <= radius) return p;
    }
    return tree_.canonical(c);
}

// ---------------------------------------------------------------------------

ConvexSubsetSpace::ConvexSubsetSpace(SpacePtr ambient, Membership membership, Projector projector,
                                     std::size_t samples)
    : ambient_(std::move(ambient)), membership_(std::move(membership)), projector_(std::move(projector)),
      samples_(samples) {
    require(ambient_ != nullptr && membership_ != nullptr, ErrorCode::invalid_input,
            "convex subset needs an ambient space and a membership predicate");
}

SpacePoint ConvexSubsetSpace::project(const SpacePoint& x) const {
    require(projector_ != nullptr, ErrorCode::unsupported, "convex subset has no projector");
    return projector_(x);
}

void ConvexSubsetSpace::validate(const SpacePoint& x) const {
    ambient_->validate(x);
    require(membership_(x), ErrorCode::invalid_input, "point lies outside the convex subset");
}

double ConvexSubsetSpace::distance(const SpacePoint& x, const SpacePoint& y) const {
    return ambient_->distance(x, y);
}

SpacePoint ConvexSubsetSpace::geodesic_point(const SpacePoint& x, const SpacePoint& y, double t) const {
    validate(x);
    validate(y);
    for (std::size_t i = 1; i < samples_; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(samples_);
        require(membership_(ambient_->geodesic_point(x, y, s)), ErrorCode::convexity_violation,
                "geodesic between member points leaves the subset (at t = " + std::to_string(s) + ")");
    }
    SpacePoint g = ambient_->geodesic_point(x, y, t);
    require(membership_(g), ErrorCode::convexity_violation, "geodesic point leaves the subset");
    return g;
}

SpacePoint ConvexSubsetSpace::sample_near(const SpacePoint& center, double radius, Rng& rng) const {
    SpacePoint p = ambient_->sample_near(center, radius, rng);
    return membership_(p) ? p : project(p);
}

std::shared_ptr<const ConvexSubsetSpace> convex_subset_space(SpacePtr ambient, Membership membership,
                                                             Projector projector, std::size_t samples) {
    return std::make_shared<const ConvexSubsetSpace>(std::move(ambient), std::move(membership),
                                                     std::move(projector), samples);
}

// ---------------------------------------------------------------------------

double sampled_cat_check(const GeodesicSpace& space, std::span<const SpacePoint> points, Rng& rng,
                         std::size_t trials) {
    require(points.size() >= 3, ErrorCode::invalid_input, "CAT(k) check needs at least three points");
    const CurvatureParam k = space.curvature();
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const SpacePoint& x = points[rng.index(points.size())];
        const SpacePoint& y = points[rng.index(points.size())];
        const SpacePoint& z = points[rng.index(points.size())];
        const double c = space.distance(x, y);
        const double a = space.distance(y, z);
        const double b = space.distance(x, z);
        if (!(a + b + c < 2.0 * k.d_cap()) || a == 0.0 || b == 0.0 || c == 0.0) continue;
        if (k.positive() && std::max({a, b, c}) >= 0.5 * k.d_cap()) continue;

        const ComparisonTriangle tri = comparison_triangle(k, a, b, c);
        const double s1 = rng.uniform();
        const double s2 = rng.uniform();
        // x' on [x, y], y' on [x, z] or [y, z], chosen at random.
        const bool second_yz = rng.uniform() < 0.5;
        const SpacePoint xp = space.geodesic_point(x, y, s1);
        const SpacePoint yp = second_yz ? space.geodesic_point(y, z, s2) : space.geodesic_point(x, z, s2);
        const ModelPoint xb = comparison_point(tri, TriangleSide::xy, s1 * c);
        const ModelPoint yb = second_yz ? comparison_point(tri, TriangleSide::yz, s2 * a)
                                        : comparison_point(tri, TriangleSide::xz, s2 * b);
        worst = std::max(worst, space.distance(xp, yp) - model_distance(k, xb, yb));
    }
    return worst;
}

} // namespace catbary
