#pragma once

#include "catbary/report.hpp"
#include "catbary/solver.hpp"

#include <cstdint>
#include <variant>
#include <vector>

namespace catbary {

/// Map p -> images[i] on the points of `domain`, each moved by less than delta.
struct DeltaFunction {
    std::vector<SpacePoint> domain;
    std::vector<SpacePoint> images;
    double delta = 0.0;
};

void validate_delta_function(const GeodesicSpace& space, const DeltaFunction& f);

/// x -> rotation * x + translation on E^n.
struct EuclideanMotion {
    Eigen::MatrixXd rotation;
    Eigen::VectorXd translation;
};

/// Orthogonal map of R^{n+1} acting on S^n.
struct SphereRotation {
    Eigen::MatrixXd matrix;
};

/// Linear map of R^{n+1} preserving the Minkowski form and the upper sheet.
struct HyperbolicIsometry {
    Eigen::MatrixXd matrix;
};

/// Vertex permutation of a tree mapping edges onto edges of equal length.
struct TreeAutomorphism {
    std::vector<std::size_t> vertex_map;
};

using IsometryDescription = std::variant<EuclideanMotion, SphereRotation, HyperbolicIsometry, TreeAutomorphism>;

/// Structural check of g against the space (orthogonality, Lorentz
/// condition, edge preservation) to 1e-9; throws invalid_input.
void validate_isometry(const GeodesicSpace& space, const IsometryDescription& g);

SpacePoint apply_isometry(const GeodesicSpace& space, const IsometryDescription& g, const SpacePoint& x);

/// Largest |d(gx, gy) - d(x, y)| over the given points.
double isometry_defect(const GeodesicSpace& space, const IsometryDescription& g, const std::vector<SpacePoint>& points);

/// |r_u - r_u'| <= 2 r_1 delta for weights with sup |u - u'| < delta.
CheckRecord radius_lipschitz_check(const WeightedPointSet& w, const WeightedPointSet& w_prime, double delta);

struct ContinuityOptions {
    std::uint64_t seed = 1;
    std::size_t trials = 100;
    std::size_t bisection_steps = 8;
    double floor = 1e-12;
};

/// Searches for delta such that all sampled weight perturbations of sup-norm
/// below delta move the barycenter by less than epsilon. Reports the delta
/// found ("delta") and the largest displacement seen at that delta.
CheckRecord barycenter_continuity_check(const WeightedPointSet& w, double epsilon,
                                        const ContinuityOptions& options = {});

/// |r_u - r'| <= (sup u) delta where r' is the baryradius of the moved points.
CheckRecord point_perturbation_check(const WeightedPointSet& w, const DeltaFunction& f);

/// d(g q_u, q_u) <= 10 tol for every g in the group. Points and weights must
/// be g-invariant (hypothesis_violation otherwise). For k != 0 the record is
/// labelled as an extrapolation.
CheckRecord fixed_point_check(const WeightedPointSet& w, const std::vector<IsometryDescription>& group,
                              double tol = kDefaultTol);
CheckRecord fixed_point_check(const WeightedPointSet& w, const IsometryDescription& g, double tol = kDefaultTol);

/// Circumradius against sqrt(n / (2(n + 1))) diam(P) for P in E^n.
CheckRecord jung_verify(const std::vector<Eigen::VectorXd>& points);

} // namespace catbary
