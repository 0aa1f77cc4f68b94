#pragma once

#include "catbary/model_geometry.hpp"
#include "catbary/random.hpp"

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace catbary {

/// Position on a metric tree: an edge id and the distance from the edge's
/// first endpoint. Vertices are stored on their lowest-id incident edge.
struct TreePoint {
    std::size_t edge = 0;
    double offset = 0.0;

    friend bool operator==(const TreePoint&, const TreePoint&) = default;
};

using SpacePoint = std::variant<ModelPoint, TreePoint>;

const ModelPoint& as_model(const SpacePoint& x);
const TreePoint& as_tree(const SpacePoint& x);

/// Finite metric tree standing in for an R-tree.
class RTree {
public:
    struct Edge {
        std::size_t u = 0;
        std::size_t v = 0;
        double length = 0.0;
    };

    RTree(std::size_t vertex_count, std::vector<Edge> edges, std::vector<std::string> names = {});

    std::size_t vertex_count() const noexcept { return vertex_count_; }
    const std::vector<Edge>& edges() const noexcept { return edges_; }
    const Edge& edge(std::size_t id) const;
    const std::vector<std::string>& names() const noexcept { return names_; }
    std::size_t vertex_index(const std::string& name) const;

    double vertex_distance(std::size_t a, std::size_t b) const { return dist_[a * vertex_count_ + b]; }
    /// First edge on the path from vertex a towards vertex b (a != b).
    std::size_t next_edge(std::size_t a, std::size_t b) const { return next_[a * vertex_count_ + b]; }
    std::size_t degree(std::size_t v) const { return incident_[v].size(); }
    const std::vector<std::size_t>& incident(std::size_t v) const { return incident_[v]; }

    TreePoint vertex_point(std::size_t v) const;
    /// Validates and canonicalizes (edge, offset).
    TreePoint point(std::size_t edge, double offset) const;
    TreePoint canonical(const TreePoint& p) const;
    void validate(const TreePoint& p) const;

    /// The other endpoint of `edge` seen from vertex v.
    std::size_t opposite(std::size_t edge, std::size_t v) const;

private:
    std::size_t vertex_count_;
    std::vector<Edge> edges_;
    std::vector<std::string> names_;
    std::vector<std::vector<std::size_t>> incident_;
    std::vector<double> dist_;
    std::vector<std::size_t> next_;
};

double tree_distance(const RTree& tree, const TreePoint& p, const TreePoint& q);
TreePoint tree_geodesic_point(const RTree& tree, const TreePoint& p, const TreePoint& q, double t);

class ModelSpace;
class TreeSpace;

/// Geodesic metric space asserted to be CAT(k) for curvature().
class GeodesicSpace {
public:
    virtual ~GeodesicSpace() = default;

    virtual std::string name() const = 0;
    virtual CurvatureParam curvature() const = 0;
    /// Throws invalid_input when x is not a point of this space.
    virtual void validate(const SpacePoint& x) const = 0;
    bool contains(const SpacePoint& x) const;

    virtual double distance(const SpacePoint& x, const SpacePoint& y) const = 0;
    virtual SpacePoint geodesic_point(const SpacePoint& x, const SpacePoint& y, double t) const = 0;

    /// Starting point for the barycenter iteration.
    virtual SpacePoint initial_center(std::span<const SpacePoint> points, std::span<const double> weights) const;

    virtual const ModelSpace* model_structure() const { return nullptr; }
    virtual const TreeSpace* tree_structure() const { return nullptr; }

    /// Random point within `radius` of `center` (used by corpora and probes).
    virtual SpacePoint sample_near(const SpacePoint& center, double radius, Rng& rng) const = 0;
};

using SpacePtr = std::shared_ptr<const GeodesicSpace>;

/// M^n_k in its standard embedding.
class ModelSpace final : public GeodesicSpace {
public:
    ModelSpace(int dim, CurvatureParam k);

    static std::shared_ptr<const ModelSpace> euclidean(int dim);
    static std::shared_ptr<const ModelSpace> sphere(int dim, double k = 1.0);
    static std::shared_ptr<const ModelSpace> hyperbolic(int dim, double k = -1.0);

    int dim() const noexcept { return dim_; }
    ModelKind kind() const noexcept { return kind_for(k_); }

    /// Builds a point from ambient coordinates (validated).
    ModelPoint point(Eigen::VectorXd coords) const;

    std::string name() const override;
    CurvatureParam curvature() const override { return k_; }
    void validate(const SpacePoint& x) const override;
    double distance(const SpacePoint& x, const SpacePoint& y) const override;
    SpacePoint geodesic_point(const SpacePoint& x, const SpacePoint& y, double t) const override;
    SpacePoint initial_center(std::span<const SpacePoint> points, std::span<const double> weights) const override;
    const ModelSpace* model_structure() const override { return this; }
    SpacePoint sample_near(const SpacePoint& center, double radius, Rng& rng) const override;

private:
    int dim_;
    CurvatureParam k_;
};

class TreeSpace final : public GeodesicSpace {
public:
    explicit TreeSpace(RTree tree, std::string label = "tree");

    const RTree& tree() const noexcept { return tree_; }

    std::string name() const override { return label_; }
    CurvatureParam curvature() const override { return CurvatureParam(0.0); }
    void validate(const SpacePoint& x) const override;
    double distance(const SpacePoint& x, const SpacePoint& y) const override;
    SpacePoint geodesic_point(const SpacePoint& x, const SpacePoint& y, double t) const override;
    SpacePoint initial_center(std::span<const SpacePoint> points, std::span<const double> weights) const override;
    const TreeSpace* tree_structure() const override { return this; }
    SpacePoint sample_near(const SpacePoint& center, double radius, Rng& rng) const override;

private:
    RTree tree_;
    std::string label_;
};

using Membership = std::function<bool(const SpacePoint&)>;
using Projector = std::function<SpacePoint(const SpacePoint&)>;

/// Closed convex subset of an ambient space with the ambient geodesics.
/// Convexity is checked by sampling each requested geodesic.
class ConvexSubsetSpace final : public GeodesicSpace {
public:
    ConvexSubsetSpace(SpacePtr ambient, Membership membership, Projector projector, std::size_t samples = 64);

    const GeodesicSpace& ambient() const noexcept { return *ambient_; }
    SpacePoint project(const SpacePoint& x) const;

    std::string name() const override { return "convex subset of " + ambient_->name(); }
    CurvatureParam curvature() const override { return ambient_->curvature(); }
    void validate(const SpacePoint& x) const override;
    double distance(const SpacePoint& x, const SpacePoint& y) const override;
    SpacePoint geodesic_point(const SpacePoint& x, const SpacePoint& y, double t) const override;
    const ModelSpace* model_structure() const override { return ambient_->model_structure(); }
    const TreeSpace* tree_structure() const override { return ambient_->tree_structure(); }
    SpacePoint sample_near(const SpacePoint& center, double radius, Rng& rng) const override;

private:
    SpacePtr ambient_;
    Membership membership_;
    Projector projector_;
    std::size_t samples_;
};

std::shared_ptr<const ConvexSubsetSpace> convex_subset_space(SpacePtr ambient, Membership membership,
                                                             Projector projector, std::size_t samples = 64);

/// Sampled CAT(k) inequality test. This is a test utility, not a
/// certificate: it draws triangles from `points` and comparison-point pairs,
/// and returns the largest excess d(x', y') - d(x'', y'') found.
double sampled_cat_check(const GeodesicSpace& space, std::span<const SpacePoint> points, Rng& rng,
                         std::size_t trials);

} // namespace catbary
