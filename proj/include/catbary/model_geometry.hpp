#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstddef>

namespace catbary {

/// Curvature k together with the model-space diameter D_k
/// (pi / sqrt(k) for k > 0, +infinity otherwise).
class CurvatureParam {
public:
    explicit CurvatureParam(double k = 0.0);

    double k() const noexcept { return k_; }
    double d_cap() const noexcept { return d_cap_; }
    bool positive() const noexcept { return k_ > 0.0; }

    friend bool operator==(const CurvatureParam& a, const CurvatureParam& b) { return a.k_ == b.k_; }

private:
    double k_;
    double d_cap_;
};

enum class ModelKind { euclidean, sphere, hyperboloid };

ModelKind kind_for(const CurvatureParam& k);

/// A point of E^n (n coordinates), of the unit sphere S^n in R^{n+1}, or of
/// the upper hyperboloid sheet H^n in R^{n+1}. Sphere and hyperboloid points
/// are validated to 1e-9 and then renormalized onto their surface.
class ModelPoint {
public:
    ModelPoint(ModelKind kind, Eigen::VectorXd coords);

    ModelKind kind() const noexcept { return kind_; }
    /// Intrinsic dimension n.
    int dim() const noexcept;
    const Eigen::VectorXd& coords() const noexcept { return coords_; }
    double operator[](Eigen::Index i) const { return coords_[i]; }

    friend bool operator==(const ModelPoint& a, const ModelPoint& b) {
        return a.kind_ == b.kind_ && a.coords_.size() == b.coords_.size() && a.coords_ == b.coords_;
    }

private:
    ModelKind kind_;
    Eigen::VectorXd coords_;
};

ModelPoint euclidean_point(Eigen::VectorXd coords);
ModelPoint sphere_point(Eigen::VectorXd coords);
ModelPoint hyperboloid_point(Eigen::VectorXd coords);
/// Lifts spatial coordinates y in R^n to (y, sqrt(1 + |y|^2)) on H^n.
ModelPoint hyperboloid_lift(const Eigen::VectorXd& spatial);

/// x|_H y = sum_{i<=n} x_i y_i - x_{n+1} y_{n+1}.
double minkowski_dot(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

double model_distance(const CurvatureParam& k, const ModelPoint& x, const ModelPoint& y);

/// Point at arc length t * d(x, y) from x on the geodesic from x to y.
ModelPoint geodesic_point(const CurvatureParam& k, const ModelPoint& x, const ModelPoint& y, double t);

/// Tangent vector at `base` (ambient coordinates) pointing at `target`,
/// scaled so that its length in the ambient form equals d(base, target).
Eigen::VectorXd log_map(const CurvatureParam& k, const ModelPoint& base, const ModelPoint& target);

/// Inverse of log_map: follows the geodesic from `base` with initial
/// direction `tangent` for arc length |tangent|.
ModelPoint exp_map(const CurvatureParam& k, const ModelPoint& base, const Eigen::VectorXd& tangent);

/// Canonical base point of M^n_k: the origin, e_1, or (0, ..., 0, 1).
ModelPoint base_point(const CurvatureParam& k, int n);

/// j-th canonical unit tangent vector at base_point(k, n).
Eigen::VectorXd base_tangent(const CurvatureParam& k, int n, int j);

/// Side a of the M^2_k triangle with sides b, c enclosing the angle alpha.
double law_of_cosines(const CurvatureParam& k, double b, double c, double alpha);

/// Angle opposite side a in the M^2_k triangle with sides (a, b, c).
double comparison_angle(const CurvatureParam& k, double a, double b, double c);

enum class TriangleSide { xy, yz, xz };

/// Triangle (x, y, z) in M^2_k with a = d(y, z), b = d(x, z), c = d(x, y).
struct ComparisonTriangle {
    CurvatureParam k;
    std::array<ModelPoint, 3> vertices;
    std::array<double, 3> side_lengths;  // (a, b, c)

    double side_length(TriangleSide side) const;
};

/// Canonical placement: x at the base point, y along the first tangent axis at
/// distance c, z in the upper half plane at distance b from x.
ComparisonTriangle comparison_triangle(const CurvatureParam& k, double a, double b, double c);

/// Point on the given side at arc length s from the side's first vertex.
ModelPoint comparison_point(const ComparisonTriangle& tri, TriangleSide side, double s);

struct MkGrid {
    std::size_t radial = 256;
    std::size_t angular = 256;
    std::size_t refine = 10;
};

/// Minimum over w in the closed r-ball about x and z on the s-sphere of
/// d(w, z) - d(w, pi(z)), pi the radial projection onto the r-sphere.
double m_k_constant(const CurvatureParam& k, double r, double s, const MkGrid& grid = {});

} // namespace catbary
