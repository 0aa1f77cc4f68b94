#pragma once

// Raw-vector kernels shared by the model-space code and the exact refinement
// in the solver. Not part of the public interface.

#include "catbary/model_geometry.hpp"

#include <Eigen/Dense>

namespace catbary::detail {

// Guard tolerance for inverse trigonometric / hyperbolic arguments.
inline constexpr double kDomainTol = 1e-12;

/// Euclidean dot for E^n and S^n, Minkowski form for H^n.
double form(ModelKind kind, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

/// sqrt(|k|), or 1 for k = 0.
double curvature_scale(const CurvatureParam& k);

/// Distance of the unit-curvature model (angle for S^n, hyperbolic length for
/// H^n); the M^n_k distance is this value divided by curvature_scale(k).
double unit_distance(ModelKind kind, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Ambient representative (w.r.t. `form`) of the gradient of the unit-model
/// distance to p at x, for x != p; `dist` is unit_distance(x, p).
Eigen::VectorXd unit_distance_gradient(ModelKind kind, const Eigen::VectorXd& x, const Eigen::VectorXd& p,
                                       double dist);

/// Projects y onto the model surface (identity for E^n). Returns false when
/// y has no admissible normalization.
bool normalize(ModelKind kind, Eigen::VectorXd& y);

/// Orthogonal projection of v onto the tangent space at x.
Eigen::VectorXd tangent_project(ModelKind kind, const Eigen::VectorXd& x, const Eigen::VectorXd& v);

/// Orthonormal (w.r.t. `form`) basis of the tangent space at x, as columns.
Eigen::MatrixXd tangent_basis(ModelKind kind, const Eigen::VectorXd& x);

} // namespace catbary::detail
