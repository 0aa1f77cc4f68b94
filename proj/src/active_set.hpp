#pragma once

// Exact refinement of a model-space barycenter: solve for the point that
// equalizes u_i d(x, p_i) over a candidate active set, then certify it with
// non-negative multipliers. Everything here is in unit-curvature coordinates.

#include "catbary/model_geometry.hpp"

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace catbary::detail {

struct ActiveSetOutcome {
    Eigen::VectorXd x;
    double radius = 0.0;  // unit-model objective at x
    double residual = 0.0;
    bool certified = false;
    std::size_t solves = 0;
};

/// Weighted objective max_i u_i d(x, p_i) in the unit model.
double unit_objective(ModelKind kind, const std::vector<Eigen::VectorXd>& points, const std::vector<double>& weights,
                      const Eigen::VectorXd& x);

/// Searches candidate active sets near x0. On failure the outcome holds the
/// best point seen (never worse than x0) with certified = false.
ActiveSetOutcome refine_active_set(ModelKind kind, int dim, const std::vector<Eigen::VectorXd>& points,
                                   const std::vector<double>& weights, const Eigen::VectorXd& x0);

} // namespace catbary::detail
