#pragma once

#include "catbary/geodesic_spaces.hpp"

#include <Eigen/Dense>

#include <initializer_list>
#include <vector>

namespace testing {

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (double x : xs) v[i++] = x;
    return v;
}

inline catbary::SpacePoint e(std::initializer_list<double> xs) { return catbary::euclidean_point(vec(xs)); }

inline std::vector<catbary::SpacePoint> line_points(std::initializer_list<double> xs) {
    std::vector<catbary::SpacePoint> out;
    for (double x : xs) out.push_back(catbary::euclidean_point(vec({x})));
    return out;
}

inline double coord(const catbary::SpacePoint& p, Eigen::Index i = 0) { return catbary::as_model(p)[i]; }

// cosh by its power series; independent of the library's hyperbolic kernels.
inline double cosh_series(double x) {
    double term = 1.0;
    double sum = 1.0;
    for (int n = 1; n < 40; ++n) {
        term *= x * x / ((2.0 * n - 1.0) * (2.0 * n));
        sum += term;
    }
    return sum;
}

} // namespace testing
