#pragma once

#include "catbary/report.hpp"
#include "catbary/solver.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace catbary {

struct VerifyOptions {
    std::uint64_t seed = 1;
    /// Instances per space family (clouds for jung, boundary samples for
    /// retraction, random triples for mk); 0 selects the suite default.
    std::size_t count = 0;
    double tol = kDefaultTol;
};

/// jung, scaling, containment, continuity, fixed-point, gh, retraction, mk,
/// and the additional suites zero-weight, equivariance, oracle, stability.
const std::vector<std::string>& verify_suites();

/// Runs one suite on its seeded corpus. Unknown names raise invalid_input.
std::vector<CheckRecord> run_suite(std::string_view suite, const VerifyOptions& options = {});

/// Euclidean distance from q to the convex hull of `points` (minimum-norm
/// point by Wolfe's method).
double hull_distance(const std::vector<Eigen::VectorXd>& points, const Eigen::VectorXd& q);

} // namespace catbary
