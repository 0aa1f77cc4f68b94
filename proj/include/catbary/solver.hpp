#pragma once

#include "catbary/error.hpp"
#include "catbary/geodesic_spaces.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace catbary {

/// Points P of a geodesic space with non-negative weights u.
struct WeightedPointSet {
    SpacePtr space;
    std::vector<SpacePoint> points;
    std::vector<double> weights;
};

/// Unit weights for every point.
WeightedPointSet unit_weights(SpacePtr space, std::vector<SpacePoint> points);

struct BarycenterResult {
    SpacePoint barycenter;
    double baryradius = 0.0;
    /// Indices (into the caller's point list) within the activity tolerance
    /// of the maximum u(p) d(q, p).
    std::vector<std::size_t> active_indices;
    std::size_t iterations = 0;
    double residual = 0.0;
    /// True when an optimality certificate (active set with non-negative
    /// multipliers) was found, or the answer is exact by construction.
    bool certified = false;
};

/// Raised when the iteration budget runs out; carries the best iterate.
class NonConvergence : public Error {
public:
    NonConvergence(const std::string& message, BarycenterResult best)
        : Error(ErrorCode::non_convergence, message), best_(std::move(best)) {}

    const BarycenterResult& best() const noexcept { return best_; }

private:
    BarycenterResult best_;
};

inline constexpr double kDefaultTol = 1e-8;
inline constexpr std::size_t kDefaultMaxIter = 50000;
inline constexpr double kActivityTol = 1e-6;

/// max_p u(p) d(x, p).
double objective(const WeightedPointSet& w, const SpacePoint& x);

/// Index attaining the objective at x, lowest index on ties.
std::size_t farthest_index(const WeightedPointSet& w, const SpacePoint& x);

/// Indices whose weighted distance is within kActivityTol (relative) of the maximum.
std::vector<std::size_t> active_set(const WeightedPointSet& w, const SpacePoint& x);

/// Largest pairwise distance.
double diameter(const GeodesicSpace& space, const std::vector<SpacePoint>& points);

/// Checks the WeightedPointSet invariants; throws on violation.
void validate_weighted_set(const WeightedPointSet& w);

BarycenterResult barycenter(const WeightedPointSet& w, double tol = kDefaultTol,
                            std::size_t max_iter = kDefaultMaxIter);

BarycenterResult circumcenter(SpacePtr space, const std::vector<SpacePoint>& points, double tol = kDefaultTol,
                              std::size_t max_iter = kDefaultMaxIter);

/// Minimizer of sup_p u(p) d(x, p)^t, solved with weights u^(1/t).
BarycenterResult barycenter_pow(const WeightedPointSet& w, double t, double tol = kDefaultTol,
                                std::size_t max_iter = kDefaultMaxIter);

/// Search region for the grid oracle: a closed ball, given in a chart about
/// `center` (the identity chart for E^n, the exponential chart otherwise).
struct OracleBounds {
    SpacePoint center;
    double radius = 0.0;
};

/// Branch-and-bound over chart cells: a cell is discarded once its Lipschitz
/// lower bound exceeds the best value found.
struct OracleOptions {
    std::size_t initial_cells_1d = 1024;
    std::size_t initial_cells_2d = 128;
    std::size_t max_live_cells = 4000;
    /// Stop when the cell half-diagonal falls below this fraction of the radius.
    double min_cell_fraction = 1e-12;
};

/// Ball about the first positive-weight point with radius diam(P); it
/// contains P and hence the barycenter.
OracleBounds default_oracle_bounds(const WeightedPointSet& w);

/// Independent brute-force minimizer. Model spaces E^1, E^2, S^2, H^2 use a
/// refined chart grid; trees use exact edge-wise piecewise-linear minimization.
BarycenterResult oracle_grid(const WeightedPointSet& w, const std::optional<OracleBounds>& bounds = std::nullopt,
                             const OracleOptions& options = {});

} // namespace catbary
