#include "catbary/model_geometry.hpp"

#include "catbary/error.hpp"
#include "model_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace catbary {

using Eigen::VectorXd;

namespace {

constexpr double kPointTol = 1e-9;
constexpr double pi = std::numbers::pi;

double sq(double v) { return v * v; }

// Clamps `value` into [lo, hi] when it lies within `tol` of the interval.
double guarded_clamp(double value, double lo, double hi, double tol, const char* what) {
    if (!std::isfinite(value) || value < lo - tol || value > hi + tol) {
        std::ostringstream msg;
        msg << what << ": argument " << value << " outside [" << lo << ", " << hi << "]";
        fail(ErrorCode::numeric_domain, msg.str());
    }
    return std::clamp(value, lo, hi);
}

void check_pair(const CurvatureParam& k, const ModelPoint& x, const ModelPoint& y) {
    require(x.kind() == y.kind() && x.coords().size() == y.coords().size(), ErrorCode::invalid_input,
            "model points of different kinds or dimensions");
    require(x.kind() == kind_for(k), ErrorCode::invalid_input, "model point kind does not match the sign of k");
}

} // namespace

namespace detail {

double form(ModelKind kind, const VectorXd& a, const VectorXd& b) {
    return kind == ModelKind::hyperboloid ? minkowski_dot(a, b) : a.dot(b);
}

double curvature_scale(const CurvatureParam& k) { return k.k() == 0.0 ? 1.0 : std::sqrt(std::abs(k.k())); }

double unit_distance(ModelKind kind, const VectorXd& x, const VectorXd& y) {
    switch (kind) {
    case ModelKind::euclidean:
        return (x - y).norm();
    case ModelKind::sphere: {
        // Chord form stays accurate for nearby points, unlike arccos(x.y).
        const double half_chord = 0.5 * (x - y).norm();
        return 2.0 * std::asin(guarded_clamp(half_chord, 0.0, 1.0, kDomainTol, "sphere distance"));
    }
    case ModelKind::hyperboloid: {
        const VectorXd diff = x - y;
        const double q = minkowski_dot(diff, diff);
        const double scale = 1.0 + x.squaredNorm() + y.squaredNorm();
        const double guarded = guarded_clamp(q, 0.0, std::numeric_limits<double>::infinity(), kDomainTol * scale,
                                             "hyperboloid distance");
        return 2.0 * std::asinh(0.5 * std::sqrt(guarded));
    }
    }
    return 0.0;
}

VectorXd unit_distance_gradient(ModelKind kind, const VectorXd& x, const VectorXd& p, double dist) {
    switch (kind) {
    case ModelKind::euclidean:
        return (x - p) / dist;
    case ModelKind::sphere:
        return -(p - x * x.dot(p)) / std::sin(dist);
    case ModelKind::hyperboloid:
        return -(p + x * minkowski_dot(x, p)) / std::sinh(dist);
    }
    return {};
}

bool normalize(ModelKind kind, VectorXd& y) {
    switch (kind) {
    case ModelKind::euclidean:
        return y.allFinite();
    case ModelKind::sphere: {
        const double n = y.norm();
        if (!(n > 0.0) || !std::isfinite(n)) return false;
        y /= n;
        return true;
    }
    case ModelKind::hyperboloid: {
        const double q = -minkowski_dot(y, y);
        const Eigen::Index last = y.size() - 1;
        if (!(q > 0.0) || !(y[last] > 0.0) || !std::isfinite(q)) return false;
        y /= std::sqrt(q);
        return true;
    }
    }
    return false;
}

VectorXd tangent_project(ModelKind kind, const VectorXd& x, const VectorXd& v) {
    switch (kind) {
    case ModelKind::euclidean:
        return v;
    case ModelKind::sphere:
        return v - x * x.dot(v);
    case ModelKind::hyperboloid:
        return v + x * minkowski_dot(x, v);
    }
    return v;
}

Eigen::MatrixXd tangent_basis(ModelKind kind, const VectorXd& x) {
    const Eigen::Index ambient = x.size();
    const Eigen::Index n = kind == ModelKind::euclidean ? ambient : ambient - 1;
    Eigen::MatrixXd basis(ambient, n);
    Eigen::Index found = 0;
    for (Eigen::Index i = 0; i < ambient && found < n; ++i) {
        VectorXd v = tangent_project(kind, x, VectorXd::Unit(ambient, i));
        for (Eigen::Index j = 0; j < found; ++j) v -= basis.col(j) * form(kind, basis.col(j), v);
        const double len2 = form(kind, v, v);
        if (len2 > 1e-6) basis.col(found++) = v / std::sqrt(len2);
    }
    return basis;
}

} // namespace detail

CurvatureParam::CurvatureParam(double k) : k_(k) {
    require(std::isfinite(k), ErrorCode::invalid_input, "curvature must be finite");
    d_cap_ = k > 0.0 ? pi / std::sqrt(k) : std::numeric_limits<double>::infinity();
}

ModelKind kind_for(const CurvatureParam& k) {
    if (k.k() > 0.0) return ModelKind::sphere;
    if (k.k() < 0.0) return ModelKind::hyperboloid;
    return ModelKind::euclidean;
}

ModelPoint::ModelPoint(ModelKind kind, VectorXd coords) : kind_(kind), coords_(std::move(coords)) {
    require(coords_.size() >= 1 && coords_.allFinite(), ErrorCode::invalid_input,
            "model point coordinates must be finite and non-empty");
    switch (kind_) {
    case ModelKind::euclidean:
        break;
    case ModelKind::sphere: {
        require(coords_.size() >= 2, ErrorCode::invalid_input, "sphere points need at least 2 coordinates");
        const double n = coords_.norm();
        require(std::abs(n - 1.0) <= kPointTol, ErrorCode::invalid_input, "sphere point is not a unit vector");
        coords_ /= n;
        break;
    }
    case ModelKind::hyperboloid: {
        require(coords_.size() >= 2, ErrorCode::invalid_input, "hyperboloid points need at least 2 coordinates");
        const Eigen::Index last = coords_.size() - 1;
        const double q = minkowski_dot(coords_, coords_);
        require(coords_[last] > 0.0, ErrorCode::invalid_input, "hyperboloid point must lie on the upper sheet");
        require(std::abs(q + 1.0) <= kPointTol * std::max(1.0, coords_.squaredNorm()), ErrorCode::invalid_input,
                "hyperboloid point does not satisfy x|_H x = -1");
        coords_[last] = std::sqrt(1.0 + coords_.head(last).squaredNorm());
        break;
    }
    }
}

int ModelPoint::dim() const noexcept {
    return static_cast<int>(kind_ == ModelKind::euclidean ? coords_.size() : coords_.size() - 1);
}

ModelPoint euclidean_point(VectorXd coords) { return ModelPoint(ModelKind::euclidean, std::move(coords)); }
ModelPoint sphere_point(VectorXd coords) { return ModelPoint(ModelKind::sphere, std::move(coords)); }
ModelPoint hyperboloid_point(VectorXd coords) { return ModelPoint(ModelKind::hyperboloid, std::move(coords)); }

ModelPoint hyperboloid_lift(const VectorXd& spatial) {
    VectorXd c(spatial.size() + 1);
    c.head(spatial.size()) = spatial;
    c[spatial.size()] = std::sqrt(1.0 + spatial.squaredNorm());
    return hyperboloid_point(std::move(c));
}

double minkowski_dot(const VectorXd& x, const VectorXd& y) {
    const Eigen::Index last = x.size() - 1;
    return x.head(last).dot(y.head(last)) - x[last] * y[last];
}

double model_distance(const CurvatureParam& k, const ModelPoint& x, const ModelPoint& y) {
    check_pair(k, x, y);
    return detail::unit_distance(x.kind(), x.coords(), y.coords()) / detail::curvature_scale(k);
}

VectorXd log_map(const CurvatureParam& k, const ModelPoint& base, const ModelPoint& target) {
    check_pair(k, base, target);
    const VectorXd& x = base.coords();
    const VectorXd& y = target.coords();
    if (base.kind() == ModelKind::euclidean) return y - x;
    const double theta = detail::unit_distance(base.kind(), x, y);
    const VectorXd w = detail::tangent_project(base.kind(), x, y);
    const double wn = std::sqrt(std::max(0.0, detail::form(base.kind(), w, w)));
    if (wn == 0.0 || theta == 0.0) return VectorXd::Zero(x.size());
    return w * (theta / wn / detail::curvature_scale(k));
}

ModelPoint exp_map(const CurvatureParam& k, const ModelPoint& base, const VectorXd& tangent) {
    require(tangent.size() == base.coords().size(), ErrorCode::invalid_input, "tangent vector has wrong size");
    const ModelKind kind = base.kind();
    require(kind == kind_for(k), ErrorCode::invalid_input, "model point kind does not match the sign of k");
    const VectorXd& x = base.coords();
    if (kind == ModelKind::euclidean) return euclidean_point(x + tangent);
    const VectorXd v = detail::tangent_project(kind, x, tangent);
    const double vn = std::sqrt(std::max(0.0, detail::form(kind, v, v)));
    if (vn == 0.0) return base;
    const double theta = vn * detail::curvature_scale(k);
    VectorXd y = kind == ModelKind::sphere ? VectorXd(std::cos(theta) * x + std::sin(theta) * (v / vn))
                                           : VectorXd(std::cosh(theta) * x + std::sinh(theta) * (v / vn));
    if (!detail::normalize(kind, y)) fail(ErrorCode::numeric_domain, "exp_map left the model surface");
    return ModelPoint(kind, std::move(y));
}

ModelPoint geodesic_point(const CurvatureParam& k, const ModelPoint& x, const ModelPoint& y, double t) {
    check_pair(k, x, y);
    require(std::isfinite(t) && t >= 0.0 && t <= 1.0, ErrorCode::invalid_input, "geodesic parameter outside [0, 1]");
    if (x.kind() == ModelKind::euclidean) return euclidean_point(x.coords() + t * (y.coords() - x.coords()));
    if (k.positive()) {
        const double theta = detail::unit_distance(x.kind(), x.coords(), y.coords());
        require(theta < pi * (1.0 - 1e-12), ErrorCode::no_unique_geodesic,
                "points are antipodal: no unique geodesic (d(x, y) >= D_k)");
    }
    if (t == 0.0) return x;
    if (t == 1.0) return y;
    return exp_map(k, x, t * log_map(k, x, y));
}

ModelPoint base_point(const CurvatureParam& k, int n) {
    require(n >= 1, ErrorCode::invalid_input, "dimension must be positive");
    switch (kind_for(k)) {
    case ModelKind::euclidean:
        return euclidean_point(VectorXd::Zero(n));
    case ModelKind::sphere:
        return sphere_point(VectorXd::Unit(n + 1, 0));
    case ModelKind::hyperboloid:
        return hyperboloid_point(VectorXd::Unit(n + 1, n));
    }
    return euclidean_point(VectorXd::Zero(n));
}

VectorXd base_tangent(const CurvatureParam& k, int n, int j) {
    require(j >= 0 && j < n, ErrorCode::invalid_input, "tangent index out of range");
    switch (kind_for(k)) {
    case ModelKind::euclidean:
        return VectorXd::Unit(n, j);
    case ModelKind::sphere:
        return VectorXd::Unit(n + 1, j + 1);
    case ModelKind::hyperboloid:
        return VectorXd::Unit(n + 1, j);
    }
    return {};
}

double law_of_cosines(const CurvatureParam& k, double b, double c, double alpha) {
    require(std::isfinite(b) && std::isfinite(c) && b >= 0.0 && c >= 0.0, ErrorCode::invalid_input,
            "side lengths must be finite and non-negative");
    require(std::isfinite(alpha) && alpha >= -detail::kDomainTol && alpha <= pi + detail::kDomainTol,
            ErrorCode::invalid_input, "angle outside [0, pi]");
    alpha = std::clamp(alpha, 0.0, pi);
    const double hav = sq(std::sin(0.5 * alpha));
    if (k.k() == 0.0) return std::sqrt(sq(b - c) + 4.0 * b * c * hav);

    const double s = detail::curvature_scale(k);
    const double B = s * b;
    const double C = s * c;
    if (k.positive()) {
        require(b < k.d_cap() && c < k.d_cap(), ErrorCode::invalid_input, "sides must be shorter than D_k");
        // Haversine form of cos A = cos B cos C + sin B sin C cos(alpha).
        const double v = sq(std::sin(0.5 * (B - C))) + std::sin(B) * std::sin(C) * hav;
        const double h = guarded_clamp(std::sqrt(std::max(0.0, v)), 0.0, 1.0, detail::kDomainTol, "law of cosines");
        return 2.0 * std::asin(h) / s;
    }
    // cosh A = cosh B cosh C - sinh B sinh C cos(alpha), in half-angle form.
    const double v = sq(std::sinh(0.5 * (B - C))) + std::sinh(B) * std::sinh(C) * hav;
    return 2.0 * std::asinh(std::sqrt(std::max(0.0, v))) / s;
}

double comparison_angle(const CurvatureParam& k, double a, double b, double c) {
    if (b == 0.0 || c == 0.0) return 0.0;
    double num_hi = 0.0;
    double num_lo = 0.0;
    double den = 0.0;
    if (k.k() == 0.0) {
        num_hi = a * a;
        num_lo = sq(b - c);
        den = 4.0 * b * c;
    } else {
        const double s = detail::curvature_scale(k);
        if (k.positive()) {
            num_hi = sq(std::sin(0.5 * s * a));
            num_lo = sq(std::sin(0.5 * s * (b - c)));
            den = std::sin(s * b) * std::sin(s * c);
        } else {
            num_hi = sq(std::sinh(0.5 * s * a));
            num_lo = sq(std::sinh(0.5 * s * (b - c)));
            den = std::sinh(s * b) * std::sinh(s * c);
        }
    }
    const double tol = detail::kDomainTol * std::max(1.0, (num_hi + num_lo) / den);
    const double h = guarded_clamp((num_hi - num_lo) / den, 0.0, 1.0, tol, "comparison angle");
    return 2.0 * std::asin(std::sqrt(h));
}

double ComparisonTriangle::side_length(TriangleSide side) const {
    switch (side) {
    case TriangleSide::xy:
        return side_lengths[2];
    case TriangleSide::yz:
        return side_lengths[0];
    case TriangleSide::xz:
        return side_lengths[1];
    }
    return 0.0;
}

ComparisonTriangle comparison_triangle(const CurvatureParam& k, double a, double b, double c) {
    require(std::isfinite(a) && std::isfinite(b) && std::isfinite(c) && a >= 0.0 && b >= 0.0 && c >= 0.0,
            ErrorCode::infeasible_triangle, "side lengths must be finite and non-negative");
    const double slack = 1e-12 * (a + b + c);
    require(a <= b + c + slack && b <= a + c + slack && c <= a + b + slack, ErrorCode::infeasible_triangle,
            "side lengths violate the triangle inequality");
    require(a + b + c < 2.0 * k.d_cap(), ErrorCode::infeasible_triangle, "perimeter must be less than 2 D_k");

    const double alpha = comparison_angle(k, a, b, c);
    const ModelPoint x = base_point(k, 2);
    const VectorXd e1 = base_tangent(k, 2, 0);
    const VectorXd e2 = base_tangent(k, 2, 1);
    const ModelPoint y = exp_map(k, x, c * e1);
    const ModelPoint z = exp_map(k, x, b * (std::cos(alpha) * e1 + std::sin(alpha) * e2));
    return ComparisonTriangle{k, {x, y, z}, {a, b, c}};
}

ModelPoint comparison_point(const ComparisonTriangle& tri, TriangleSide side, double s) {
    const double len = tri.side_length(side);
    const double tol = 1e-12 * std::max(1.0, len);
    require(std::isfinite(s) && s >= -tol && s <= len + tol, ErrorCode::invalid_input,
            "comparison point parameter outside the side");
    const auto& v = tri.vertices;
    const double t = len > 0.0 ? std::clamp(s / len, 0.0, 1.0) : 0.0;
    switch (side) {
    case TriangleSide::xy:
        return geodesic_point(tri.k, v[0], v[1], t);
    case TriangleSide::yz:
        return geodesic_point(tri.k, v[1], v[2], t);
    case TriangleSide::xz:
        return geodesic_point(tri.k, v[0], v[2], t);
    }
    return v[0];
}

double m_k_constant(const CurvatureParam& k, double r, double s, const MkGrid& grid) {
    require(std::isfinite(r) && std::isfinite(s) && r > 0.0 && r < s, ErrorCode::invalid_input,
            "m_k requires 0 < r < s");
    require(s < 0.5 * k.d_cap(), ErrorCode::invalid_input, "m_k requires s < D_k / 2");
    require(grid.radial >= 2 && grid.angular >= 2 && grid.refine >= 1, ErrorCode::invalid_input,
            "m_k grid needs at least 2 samples per axis");

    // Rotational symmetry fixes z on the first axis; w sweeps a half disk.
    const ModelPoint x = base_point(k, 2);
    const VectorXd e1 = base_tangent(k, 2, 0);
    const VectorXd e2 = base_tangent(k, 2, 1);
    const ModelPoint z = exp_map(k, x, s * e1);
    const ModelPoint pz = exp_map(k, x, r * e1);
    auto f = [&](double rho, double theta) {
        const ModelPoint w = exp_map(k, x, rho * (std::cos(theta) * e1 + std::sin(theta) * e2));
        return model_distance(k, w, z) - model_distance(k, w, pz);
    };

    const double d_rho = r / static_cast<double>(grid.radial - 1);
    const double d_theta = pi / static_cast<double>(grid.angular - 1);
    double best = std::numeric_limits<double>::infinity();
    double best_rho = 0.0;
    double best_theta = 0.0;
    for (std::size_t i = 0; i < grid.radial; ++i) {
        for (std::size_t j = 0; j < grid.angular; ++j) {
            const double rho = d_rho * static_cast<double>(i);
            const double theta = d_theta * static_cast<double>(j);
            const double v = f(rho, theta);
            if (v < best) {
                best = v;
                best_rho = rho;
                best_theta = theta;
            }
        }
    }

    // One refinement pass: a one-cell neighbourhood at 1/refine spacing.
    const auto steps = static_cast<long>(grid.refine);
    const double c_rho = best_rho;
    const double c_theta = best_theta;
    for (long i = -steps; i <= steps; ++i) {
        for (long j = -steps; j <= steps; ++j) {
            const double rho = c_rho + d_rho * static_cast<double>(i) / static_cast<double>(grid.refine);
            const double theta = c_theta + d_theta * static_cast<double>(j) / static_cast<double>(grid.refine);
            if (rho < 0.0 || rho > r || theta < 0.0 || theta > pi) continue;
            best = std::min(best, f(rho, theta));
        }
    }
    return best;
}

} // namespace catbary
