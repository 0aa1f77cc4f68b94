#include "catbary/retraction.hpp"

#include "catbary/error.hpp"
#include "catbary/random.hpp"
#include "catbary/solver.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace catbary {

using Eigen::VectorXd;

namespace {

constexpr int kKeyBits = 21;
constexpr std::int64_t kKeyOffset = std::int64_t{1} << (kKeyBits - 1);
constexpr int kMaxLevel = 18;

double whitney_constant(int dim) { return 2.0 * std::sqrt(static_cast<double>(dim)); }

// Accepted cells have radius below (kappa + sqrt(n) / 4) s, so their balls
// reach at most this many cells beyond their own.
int query_reach(int dim) {
    return static_cast<int>(std::ceil(whitney_constant(dim) + 0.25 * std::sqrt(static_cast<double>(dim)))) + 1;
}

void require_dim(const VectorXd& y, int dim) {
    require(y.size() == dim, ErrorCode::invalid_input, "point has the wrong dimension for the target");
}

} // namespace

ConvexTarget disk_target(const VectorXd& center, double radius) {
    require(std::isfinite(radius) && radius > 0.0 && center.allFinite(), ErrorCode::invalid_input,
            "disk needs a finite center and positive radius");
    ConvexTarget t;
    t.dim = static_cast<int>(center.size());
    t.name = "disk";
    t.contains = [center, radius](const VectorXd& y) { return (y - center).norm() <= radius; };
    t.project = [center, radius](const VectorXd& y) -> VectorXd {
        const VectorXd d = y - center;
        const double n = d.norm();
        if (n <= radius) return y;
        return center + d * (radius / n);
    };
    return t;
}

ConvexTarget half_space_target(const VectorXd& normal, double offset) {
    const double len = normal.norm();
    require(len > 0.0 && std::isfinite(offset), ErrorCode::invalid_input, "half-space needs a non-zero normal");
    const VectorXd n = normal / len;
    const double c = offset / len;
    ConvexTarget t;
    t.dim = static_cast<int>(normal.size());
    t.name = "half-space";
    t.contains = [n, c](const VectorXd& y) { return n.dot(y) >= c; };
    t.project = [n, c](const VectorXd& y) -> VectorXd {
        const double s = n.dot(y) - c;
        return s >= 0.0 ? y : VectorXd(y - s * n);
    };
    return t;
}

ConvexTarget box_target(const VectorXd& lo, const VectorXd& hi) {
    require(lo.size() == hi.size() && (hi.array() >= lo.array()).all(), ErrorCode::invalid_input,
            "box corners must satisfy lo <= hi");
    ConvexTarget t;
    t.dim = static_cast<int>(lo.size());
    t.name = "box";
    t.contains = [lo, hi](const VectorXd& y) { return (y.array() >= lo.array()).all() && (y.array() <= hi.array()).all(); };
    t.project = [lo, hi](const VectorXd& y) -> VectorXd { return y.cwiseMax(lo).cwiseMin(hi); };
    return t;
}

bool Window::contains(const VectorXd& y) const {
    return (y.array() >= lo.array()).all() && (y.array() <= hi.array()).all();
}

// ---------------------------------------------------------------------------

BallCover::BallCover(ConvexTarget target, Window window, double packing)
    : target_(std::move(target)), window_(std::move(window)), packing_(packing), dim_(target_.dim) {
    require(dim_ >= 1 && dim_ <= 3, ErrorCode::invalid_input, "retraction supports E^1, E^2, E^3");
    require(window_.lo.size() == dim_ && window_.hi.size() == dim_ &&
                (window_.hi.array() > window_.lo.array()).all(),
            ErrorCode::invalid_input, "window must be a non-degenerate box of the target dimension");
    require(std::isfinite(packing) && packing > 0.0, ErrorCode::invalid_input, "packing must be positive");
    root_side_ = (window_.hi - window_.lo).minCoeff();
}

VectorXd BallCover::center(std::size_t i) const {
    return Eigen::Map<const VectorXd>(centers_.data() + i * static_cast<std::size_t>(dim_), dim_);
}

VectorXd BallCover::anchor(std::size_t i) const {
    return Eigen::Map<const VectorXd>(anchors_.data() + i * static_cast<std::size_t>(dim_), dim_);
}

std::uint64_t BallCover::key(const VectorXd& y, int level) const {
    const double side = std::ldexp(root_side_, -level);
    std::uint64_t k = 0;
    for (int d = 0; d < dim_; ++d) {
        const auto i = static_cast<std::int64_t>(std::floor((y[d] - window_.lo[d]) / side)) + kKeyOffset;
        k = (k << kKeyBits) | (static_cast<std::uint64_t>(i) & ((std::uint64_t{1} << kKeyBits) - 1));
    }
    return k;
}

void BallCover::add_member(const VectorXd& c, double radius, const VectorXd& anchor, int level,
                           const VectorXd& cell_lo) {
    if (index_.size() <= static_cast<std::size_t>(level)) index_.resize(static_cast<std::size_t>(level) + 1);
    const std::size_t id = radii_.size();
    centers_.insert(centers_.end(), c.data(), c.data() + dim_);
    anchors_.insert(anchors_.end(), anchor.data(), anchor.data() + dim_);
    radii_.push_back(radius);
    // Key by the cell's lower corner nudged inwards, so rounding cannot move it.
    const VectorXd probe = cell_lo + VectorXd::Constant(dim_, 0.25 * std::ldexp(root_side_, -level));
    index_[static_cast<std::size_t>(level)][key(probe, level)].push_back(id);
}

std::vector<std::size_t> BallCover::containing(const VectorXd& y) const {
    require_dim(y, dim_);
    std::vector<std::size_t> out;
    const int reach = query_reach(dim_);
    for (std::size_t level = 0; level < index_.size(); ++level) {
        const auto& cells = index_[level];
        if (cells.empty()) continue;
        const double side = std::ldexp(root_side_, -static_cast<int>(level));
        std::int64_t base[3] = {0, 0, 0};
        for (int d = 0; d < dim_; ++d) {
            base[d] = static_cast<std::int64_t>(std::floor((y[d] - window_.lo[d]) / side)) + kKeyOffset;
        }
        std::int64_t off[3] = {-reach, dim_ > 1 ? -reach : 0, dim_ > 2 ? -reach : 0};
        while (true) {
            std::uint64_t k = 0;
            for (int d = 0; d < dim_; ++d) {
                k = (k << kKeyBits) | (static_cast<std::uint64_t>(base[d] + off[d]) & ((std::uint64_t{1} << kKeyBits) - 1));
            }
            if (const auto it = cells.find(k); it != cells.end()) {
                for (std::size_t id : it->second) {
                    double d2 = 0.0;
                    for (int d = 0; d < dim_; ++d) {
                        const double t = y[d] - centers_[id * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(d)];
                        d2 += t * t;
                    }
                    if (std::sqrt(d2) < radii_[id]) out.push_back(id);
                }
            }
            int d = 0;
            for (; d < dim_; ++d) {
                if (++off[d] <= reach) break;
                off[d] = -reach;
            }
            if (d == dim_) break;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

BallCover build_cover(const ConvexTarget& target, const Window& window, double packing,
                      std::size_t validation_resolution) {
    BallCover cover(target, window, packing);
    const int n = cover.dim_;
    const double kappa = whitney_constant(n);
    const double half_diag_unit = 0.5 * std::sqrt(static_cast<double>(n));

    // Smallest cell side with (kappa + sqrt(n)/2) s <= packing.
    int max_level = 0;
    while (std::ldexp(cover.root_side_, -max_level) * (kappa + half_diag_unit) > packing) ++max_level;
    require(max_level <= kMaxLevel, ErrorCode::invalid_input, "packing is too small for the window");
    cover.collar_width_ = std::ldexp(cover.root_side_, -max_level) * (kappa + half_diag_unit);

    struct Cell {
        VectorXd lo;
        int level;
    };
    std::vector<Cell> stack;
    {
        std::vector<long> counts(static_cast<std::size_t>(n));
        for (int d = 0; d < n; ++d) {
            counts[static_cast<std::size_t>(d)] = static_cast<long>(
                std::ceil((window.hi[d] - window.lo[d]) / cover.root_side_ - 1e-12));
        }
        std::vector<long> idx(static_cast<std::size_t>(n), 0);
        while (true) {
            VectorXd lo(n);
            for (int d = 0; d < n; ++d) lo[d] = window.lo[d] + cover.root_side_ * static_cast<double>(idx[static_cast<std::size_t>(d)]);
            stack.push_back({lo, 0});
            int d = 0;
            for (; d < n; ++d) {
                if (++idx[static_cast<std::size_t>(d)] < counts[static_cast<std::size_t>(d)]) break;
                idx[static_cast<std::size_t>(d)] = 0;
            }
            if (d == n) break;
        }
    }

    while (!stack.empty()) {
        const Cell cell = std::move(stack.back());
        stack.pop_back();
        const double side = std::ldexp(cover.root_side_, -cell.level);
        const VectorXd c = cell.lo + VectorXd::Constant(n, 0.5 * side);
        const VectorXd anchor = target.project(c);
        const double dist = (c - anchor).norm();
        if (dist >= kappa * side) {
            cover.add_member(c, 0.5 * dist, anchor, cell.level, cell.lo);
            continue;
        }
        if (dist == 0.0) {
            // A convex set holding every corner holds the whole cell.
            bool inside = true;
            for (unsigned mask = 0; mask < (1u << n) && inside; ++mask) {
                VectorXd corner = cell.lo;
                for (int d = 0; d < n; ++d) {
                    if (mask & (1u << d)) corner[d] += side;
                }
                inside = target.contains(corner);
            }
            if (inside) continue;
        }
        if (cell.level == max_level) continue;  // collar
        for (unsigned mask = 0; mask < (1u << n); ++mask) {
            VectorXd lo = cell.lo;
            for (int d = 0; d < n; ++d) {
                if (mask & (1u << d)) lo[d] += 0.5 * side;
            }
            stack.push_back({lo, cell.level + 1});
        }
    }

    // Validation grid: every point outside X and outside the collar must be covered.
    if (validation_resolution >= 2) {
        std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
        while (true) {
            VectorXd y(n);
            for (int d = 0; d < n; ++d) {
                y[d] = window.lo[d] + (window.hi[d] - window.lo[d]) * static_cast<double>(idx[static_cast<std::size_t>(d)]) /
                                          static_cast<double>(validation_resolution - 1);
            }
            if (!target.contains(y) && target.distance(y) >= cover.collar_width_ && cover.containing(y).empty()) {
                fail(ErrorCode::insufficient_cover, "validation point outside the collar is uncovered; use a smaller packing");
            }
            int d = 0;
            for (; d < n; ++d) {
                if (++idx[static_cast<std::size_t>(d)] < validation_resolution) break;
                idx[static_cast<std::size_t>(d)] = 0;
            }
            if (d == n) break;
        }
    }
    return cover;
}

std::vector<std::pair<std::size_t, double>> partition_of_unity(const BallCover& cover, const VectorXd& y) {
    require_dim(y, cover.dim());
    require(!cover.target().contains(y), ErrorCode::not_applicable, "partition of unity is not defined on X");
    const std::vector<std::size_t> members = cover.containing(y);
    require(!members.empty(), ErrorCode::uncovered_point, "point is not covered by any member");
    std::vector<std::pair<std::size_t, double>> out;
    double total = 0.0;
    for (std::size_t id : members) {
        const double w = cover.radius(id) - (y - cover.center(id)).norm();
        out.emplace_back(id, w);
        total += w;
    }
    for (auto& [id, w] : out) w /= total;
    return out;
}

std::string_view to_string(RetractMode mode) {
    switch (mode) {
    case RetractMode::identity:
        return "identity";
    case RetractMode::barycenter:
        return "barycenter";
    case RetractMode::collar_projection:
        return "collar-projection";
    }
    return "unknown";
}

Retracted retract(const BallCover& cover, const VectorXd& y) {
    require_dim(y, cover.dim());
    if (cover.target().contains(y)) return {y, RetractMode::identity};
    const std::vector<std::size_t> members = cover.containing(y);
    if (members.empty()) {
        require(cover.target().distance(y) < cover.collar_width(), ErrorCode::uncovered_point,
                "point outside the collar is not covered");
        return {cover.target().project(y), RetractMode::collar_projection};
    }
    const auto weights = partition_of_unity(cover, y);
    if (weights.size() == 1) return {cover.anchor(weights.front().first), RetractMode::barycenter};

    static const auto spaces = [] {
        std::array<std::shared_ptr<const ModelSpace>, 3> s;
        for (int d = 1; d <= 3; ++d) s[static_cast<std::size_t>(d - 1)] = ModelSpace::euclidean(d);
        return s;
    }();
    WeightedPointSet w;
    w.space = spaces[static_cast<std::size_t>(cover.dim() - 1)];
    for (const auto& [id, u] : weights) {
        w.points.push_back(euclidean_point(cover.anchor(id)));
        w.weights.push_back(u);
    }
    return {as_model(barycenter(w).barycenter).coords(), RetractMode::barycenter};
}

// ---------------------------------------------------------------------------

ProbeReport continuity_probe(const BallCover& cover, const std::vector<VectorXd>& boundary, double epsilon,
                             std::uint64_t seed, std::size_t per_sample) {
    require(std::isfinite(epsilon) && epsilon > 0.0, ErrorCode::invalid_input, "epsilon must be positive");
    Rng rng(seed);
    const int n = cover.dim();
    const double reach = epsilon / 6.0;

    ProbeReport report;
    report.modulus.suite = "retraction-modulus";
    report.modulus.bound = epsilon;
    report.anchor_distance.suite = "anchor-distance";
    report.anchor_distance.bound = 6.0;
    std::size_t probes = 0;
    std::size_t modulus_failures = 0;
    std::size_t pairs = 0;
    std::size_t anchor_failures = 0;
    double worst_ratio = 0.0;

    for (const VectorXd& x : boundary) {
        require_dim(x, n);
        for (std::size_t s = 0; s < per_sample; ++s) {
            // Directions: random; distances spread over (0, epsilon / 6).
            VectorXd dir(n);
            for (int d = 0; d < n; ++d) dir[d] = rng.normal();
            if (dir.norm() == 0.0) continue;
            const double scale = reach * (s == 0 ? 1.0 - 1e-9 : std::pow(rng.uniform(), 2.0));
            const VectorXd y = x + dir.normalized() * scale;
            if (!cover.window().contains(y)) continue;
            ++probes;
            const double moved = (retract(cover, y).point - x).norm();
            report.modulus.measured = std::max(report.modulus.measured, moved);
            if (!(moved < epsilon)) ++modulus_failures;

            if (cover.target().contains(y)) continue;
            const double dxy = (x - y).norm();
            for (std::size_t id : cover.containing(y)) {
                // Hypotheses hold by construction: y in the closed ball about v
                // of radius d(v, X) / 2 and d(v, anchor) = d(v, X) < 2 d(v, X).
                const double ratio = (x - cover.anchor(id)).norm() / dxy;
                ++pairs;
                worst_ratio = std::max(worst_ratio, ratio);
                if (!(ratio < 6.0)) ++anchor_failures;
            }
        }
    }
    report.modulus.pass = modulus_failures == 0;
    report.modulus.with("probes", static_cast<double>(probes)).with("failures", static_cast<double>(modulus_failures));
    report.anchor_distance.measured = worst_ratio;
    report.anchor_distance.pass = anchor_failures == 0;
    report.anchor_distance.with("pairs", static_cast<double>(pairs))
        .with("failures", static_cast<double>(anchor_failures));
    return report;
}

namespace {

template <class Fn>
void for_each_grid_point(const Window& window, std::size_t resolution, Fn&& fn) {
    const auto n = window.lo.size();
    std::vector<std::size_t> idx(static_cast<std::size_t>(n), 0);
    while (true) {
        VectorXd y(n);
        for (Eigen::Index d = 0; d < n; ++d) {
            y[d] = window.lo[d] + (window.hi[d] - window.lo[d]) * static_cast<double>(idx[static_cast<std::size_t>(d)]) /
                                      static_cast<double>(resolution - 1);
        }
        fn(y);
        Eigen::Index d = 0;
        for (; d < n; ++d) {
            if (++idx[static_cast<std::size_t>(d)] < resolution) break;
            idx[static_cast<std::size_t>(d)] = 0;
        }
        if (d == n) break;
    }
}

} // namespace

CheckRecord retraction_identity_check(const BallCover& cover, std::size_t resolution) {
    require(resolution >= 2, ErrorCode::invalid_input, "resolution must be at least 2");
    CheckRecord rec;
    rec.suite = "retraction-identity";
    std::size_t points = 0;
    for_each_grid_point(cover.window(), resolution, [&](const VectorXd& y) {
        if (!cover.target().contains(y)) return;
        ++points;
        rec.measured = std::max(rec.measured, (retract(cover, y).point - y).norm());
    });
    rec.bound = 0.0;
    rec.pass = rec.measured == 0.0;
    rec.with("points", static_cast<double>(points));
    return rec;
}

CheckRecord image_containment_check(const BallCover& cover, std::size_t resolution) {
    require(resolution >= 2, ErrorCode::invalid_input, "resolution must be at least 2");
    CheckRecord rec;
    rec.suite = "image-containment";
    rec.bound = 1e-9;
    std::size_t points = 0;
    std::size_t projected = 0;
    for_each_grid_point(cover.window(), resolution, [&](const VectorXd& y) {
        const Retracted r = retract(cover, y);
        ++points;
        if (r.mode == RetractMode::collar_projection) ++projected;
        rec.measured = std::max(rec.measured, cover.target().distance(r.point));
    });
    rec.pass = rec.measured <= rec.bound;
    rec.with("points", static_cast<double>(points)).with("collar_points", static_cast<double>(projected));
    return rec;
}

CheckRecord local_continuity_check(const BallCover& cover, double h, std::size_t samples, std::uint64_t seed) {
    require(std::isfinite(h) && h > 0.0 && cover.size() > 0, ErrorCode::invalid_input,
            "local continuity needs h > 0 and a non-empty cover");
    Rng rng(seed);
    const int n = cover.dim();
    std::vector<VectorXd> base;
    // Sample inside member interiors, away from X.
    while (base.size() < samples) {
        const std::size_t id = rng.index(cover.size());
        VectorXd dir(n);
        for (int d = 0; d < n; ++d) dir[d] = rng.normal();
        const VectorXd y = cover.center(id) + dir.normalized() * (0.5 * cover.radius(id) * rng.uniform());
        if (cover.window().contains(y)) base.push_back(y);
    }
    std::vector<VectorXd> images;
    for (const VectorXd& y : base) images.push_back(retract(cover, y).point);

    double maxima[3] = {0.0, 0.0, 0.0};
    for (int scale = 0; scale < 3; ++scale) {
        const double hs = h / std::pow(4.0, scale);
        for (std::size_t i = 0; i < base.size(); ++i) {
            VectorXd dir(n);
            for (int d = 0; d < n; ++d) dir[d] = rng.normal();
            const VectorXd y2 = base[i] + dir.normalized() * (hs * (1.0 - 1e-9));
            if (!cover.window().contains(y2)) continue;
            maxima[scale] = std::max(maxima[scale], (retract(cover, y2).point - images[i]).norm());
        }
    }
    CheckRecord rec;
    rec.suite = "local-continuity";
    rec.bound = maxima[0];
    rec.measured = maxima[2];
    rec.pass = (maxima[1] < maxima[0] || maxima[0] == 0.0) && (maxima[2] < maxima[1] || maxima[1] == 0.0);
    rec.with("h", h).with("max_h", maxima[0]).with("max_h4", maxima[1]).with("max_h16", maxima[2]);
    return rec;
}

std::vector<VectorXd> circle_samples(const VectorXd& center, double radius, std::size_t count) {
    require(center.size() == 2, ErrorCode::invalid_input, "circle samples need a planar center");
    std::vector<VectorXd> out;
    for (std::size_t i = 0; i < count; ++i) {
        const double t = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(count);
        VectorXd p(2);
        p << center[0] + radius * std::cos(t), center[1] + radius * std::sin(t);
        out.push_back(p);
    }
    return out;
}

void write_field_csv(std::ostream& out, const BallCover& cover, std::size_t resolution) {
    require(resolution >= 2, ErrorCode::invalid_input, "resolution must be at least 2");
    const int n = cover.dim();
    for (int d = 0; d < n; ++d) out << "y" << d << ',';
    for (int d = 0; d < n; ++d) out << "f" << d << ',';
    out << "mode\n";
    out.precision(17);
    for_each_grid_point(cover.window(), resolution, [&](const VectorXd& y) {
        const Retracted r = retract(cover, y);
        for (int d = 0; d < n; ++d) out << y[d] << ',';
        for (int d = 0; d < n; ++d) out << r.point[d] << ',';
        out << to_string(r.mode) << '\n';
    });
}

} // namespace catbary
