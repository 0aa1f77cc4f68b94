#pragma once

#include "catbary/report.hpp"
#include "catbary/solver.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace catbary {

/// max(max_a min_b d(a, b), max_b min_a d(a, b)).
double hausdorff_distance(const GeodesicSpace& ambient, const std::vector<SpacePoint>& a,
                          const std::vector<SpacePoint>& b);

/// Two finite sets in a shared ambient space (identity embeddings) whose
/// Hausdorff distance is below delta. delta bounds their GH distance.
struct FiniteResolution {
    SpacePtr ambient;
    std::vector<SpacePoint> set_a;
    std::vector<SpacePoint> set_b;
    double delta = 0.0;
};

/// Throws invalid_input unless d_H(set_a, set_b) < delta.
void validate_resolution(const FiniteResolution& r);

struct SequenceStage {
    std::vector<SpacePoint> points;
    std::vector<double> weights;
    double delta = 0.0;
};

struct ConvergingSequence {
    SpacePtr ambient;
    std::vector<SequenceStage> stages;
    std::vector<SpacePoint> limit_points;
    std::vector<double> limit_weights;
    double diameter_bound = 0.0;  // b
    double weight_bound = 0.0;    // m
};

/// Checks strictly decreasing deltas, d_H(stage, limit) < delta_n, and the
/// uniform bounds b and m; throws invalid_input.
void validate_sequence(const ConvergingSequence& seq);

/// For every stage index n >= first_stage and every pair (x_n, x) with
/// d(x_n, x) < delta_n: |u_n(x_n) - u(x)| < epsilon.
CheckRecord weight_convergence_check(const ConvergingSequence& seq, double epsilon, std::size_t first_stage);

struct LimitReport {
    std::vector<double> distances;        // d(q_n, q_u) per stage
    std::vector<double> hausdorff;        // d_H(X_n, X): upper bound on the GH distance
    std::vector<CheckRecord> ladder;      // one per s in {0.1, 0.01, 0.001} diam(X)
    std::vector<CheckRecord> pointed;     // ball inclusions with slack, per stage and radius
    std::optional<SpacePoint> limit_barycenter;

    bool all_pass() const;
};

/// Barycenters of every stage against the limit barycenter. Only spaces
/// with k <= 0 are accepted (unsupported otherwise).
LimitReport barycenter_limit(const ConvergingSequence& seq, double tol = kDefaultTol);

/// Two-sided bound for weighted distances across a resolution, given f on
/// set_a and g on set_b with |f(x) - g(y)| < epsilon whenever d(x, y) < delta:
/// |f(x') d(x, x') - g(y') d(y, y')| <= 2 delta m + epsilon b + 2 delta epsilon.
/// Quadruples are enumerated, or sampled (seeded) beyond max_quadruples.
CheckRecord resolution_bound_check(const FiniteResolution& r, const std::vector<double>& f, const std::vector<double>& g,
                      double epsilon, std::uint64_t seed = 1, std::size_t max_quadruples = 1000000);

/// Smallest epsilon admissible for resolution_bound_check: max |f(x) - g(y)| over
/// delta-close pairs, nudged up so that the strict inequality holds.
double resolution_epsilon(const FiniteResolution& r, const std::vector<double>& f, const std::vector<double>& g);

/// Nested uniform grids of [0, 1] with 2^j + 1 points, j = first..last,
/// delta_j = 2^-j, against a limit grid of 2^limit_level + 1 points.
ConvergingSequence interval_grid_sequence(const std::function<double(double)>& u, int first_level, int last_level,
                                          int limit_level);

/// Copies of `cloud` (in E^n) jittered by less than 2^-j, j = 1..levels.
ConvergingSequence jitter_sequence(const std::vector<Eigen::VectorXd>& cloud, const std::vector<double>& weights,
                                   int levels, std::uint64_t seed);

} // namespace catbary
