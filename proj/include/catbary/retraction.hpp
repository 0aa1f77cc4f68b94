#pragma once

#include "catbary/report.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace catbary {

/// Closed convex subset X of E^n given by membership and nearest-point projection.
struct ConvexTarget {
    int dim = 2;
    std::string name;
    std::function<bool(const Eigen::VectorXd&)> contains;
    std::function<Eigen::VectorXd(const Eigen::VectorXd&)> project;

    double distance(const Eigen::VectorXd& y) const { return (y - project(y)).norm(); }
};

ConvexTarget disk_target(const Eigen::VectorXd& center, double radius);
/// {x : normal . x >= offset}.
ConvexTarget half_space_target(const Eigen::VectorXd& normal, double offset);
ConvexTarget box_target(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi);

struct Window {
    Eigen::VectorXd lo;
    Eigen::VectorXd hi;

    bool contains(const Eigen::VectorXd& y) const;
};

/// Finite ball cover of window - X. Member lambda has center v, radius
/// d(v, X) / 2 and anchor x = projection of v. Members come from a
/// Whitney-style subdivision, so every point y of the window with
/// d(y, X) >= collar_width is covered.
class BallCover {
public:
    BallCover(ConvexTarget target, Window window, double packing);

    const ConvexTarget& target() const noexcept { return target_; }
    const Window& window() const noexcept { return window_; }
    double packing() const noexcept { return packing_; }
    double collar_width() const noexcept { return collar_width_; }
    std::size_t size() const noexcept { return radii_.size(); }
    int dim() const noexcept { return dim_; }

    Eigen::VectorXd center(std::size_t i) const;
    Eigen::VectorXd anchor(std::size_t i) const;
    double radius(std::size_t i) const { return radii_[i]; }

    /// Members whose open ball contains y, in increasing index order.
    std::vector<std::size_t> containing(const Eigen::VectorXd& y) const;

private:
    friend BallCover build_cover(const ConvexTarget&, const Window&, double, std::size_t);

    void add_member(const Eigen::VectorXd& center, double radius, const Eigen::VectorXd& anchor, int level,
                    const Eigen::VectorXd& cell_lo);
    std::uint64_t key(const Eigen::VectorXd& y, int level) const;

    ConvexTarget target_;
    Window window_;
    double packing_;
    double collar_width_ = 0.0;
    int dim_;
    double root_side_ = 1.0;
    std::vector<double> centers_;  // flat, dim_ per member
    std::vector<double> anchors_;
    std::vector<double> radii_;
    std::vector<std::unordered_map<std::uint64_t, std::vector<std::size_t>>> index_;  // per level
};

/// Builds the cover and validates it on a resolution^n grid of the window
/// (insufficient_cover when a point outside the collar is missed).
BallCover build_cover(const ConvexTarget& target, const Window& window, double packing,
                      std::size_t validation_resolution = 201);

/// Weights rho_lambda - |y - v_lambda| normalized to sum 1, on the members containing y.
std::vector<std::pair<std::size_t, double>> partition_of_unity(const BallCover& cover, const Eigen::VectorXd& y);

enum class RetractMode { identity, barycenter, collar_projection };

std::string_view to_string(RetractMode mode);

struct Retracted {
    Eigen::VectorXd point;
    RetractMode mode = RetractMode::identity;
};

Retracted retract(const BallCover& cover, const Eigen::VectorXd& y);

struct ProbeReport {
    CheckRecord modulus;  // d(x, f(y)) < epsilon for d(x, y) < epsilon / 6
    CheckRecord anchor_distance;  // d(x, z) < 6 d(x, y) for anchors z of members containing y
};

ProbeReport continuity_probe(const BallCover& cover, const std::vector<Eigen::VectorXd>& boundary, double epsilon,
                             std::uint64_t seed = 1, std::size_t per_sample = 8);

/// f(y) = y on sampled points of X.
CheckRecord retraction_identity_check(const BallCover& cover, std::size_t resolution);
/// f(y) in X (within 1e-9) on a grid of the window.
CheckRecord image_containment_check(const BallCover& cover, std::size_t resolution);
/// Largest d(f(y), f(y')) over sampled pairs with d(y, y') < h at h, h/4,
/// h/16; passes when the three maxima decrease.
CheckRecord local_continuity_check(const BallCover& cover, double h, std::size_t samples, std::uint64_t seed = 1);

/// Evenly spaced points on the boundary of a disk target.
std::vector<Eigen::VectorXd> circle_samples(const Eigen::VectorXd& center, double radius, std::size_t count);

/// CSV rows "y_1..y_n, f_1..f_n, mode" over a resolution^n grid (n <= 2).
void write_field_csv(std::ostream& out, const BallCover& cover, std::size_t resolution);

} // namespace catbary
