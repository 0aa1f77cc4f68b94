#include "catbary/gh_limits.hpp"

#include "catbary/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace catbary {

namespace {

// Coordinates when the ambient space is E^1; lets the searches below use
// sorted sweeps instead of all-pairs scans.
std::optional<std::vector<double>> line_coords(const GeodesicSpace& space, const std::vector<SpacePoint>& pts) {
    const ModelSpace* m = space.model_structure();
    if (m == nullptr || m->kind() != ModelKind::euclidean || m->dim() != 1) return std::nullopt;
    std::vector<double> out;
    out.reserve(pts.size());
    for (const SpacePoint& p : pts) out.push_back(as_model(p)[0]);
    return out;
}

double set_diameter(const GeodesicSpace& space, const std::vector<SpacePoint>& pts) {
    if (const auto line = line_coords(space, pts)) {
        const auto [lo, hi] = std::minmax_element(line->begin(), line->end());
        return *hi - *lo;
    }
    return diameter(space, pts);
}

double directed_hausdorff(const GeodesicSpace& space, const std::vector<SpacePoint>& a,
                          const std::vector<SpacePoint>& b) {
    const auto la = line_coords(space, a);
    const auto lb = line_coords(space, b);
    double worst = 0.0;
    if (la && lb) {
        std::vector<double> sorted = *lb;
        std::sort(sorted.begin(), sorted.end());
        for (double x : *la) {
            const auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
            double best = std::numeric_limits<double>::infinity();
            if (it != sorted.end()) best = std::min(best, *it - x);
            if (it != sorted.begin()) best = std::min(best, x - *(it - 1));
            worst = std::max(worst, best);
        }
        return worst;
    }
    for (const SpacePoint& x : a) {
        double best = std::numeric_limits<double>::infinity();
        for (const SpacePoint& y : b) best = std::min(best, space.distance(x, y));
        worst = std::max(worst, best);
    }
    return worst;
}

// Calls fn(i, j, d) for every pair with d(a_i, b_j) < radius.
template <class Fn>
void for_close_pairs(const GeodesicSpace& space, const std::vector<SpacePoint>& a, const std::vector<SpacePoint>& b,
                     double radius, Fn&& fn) {
    const auto la = line_coords(space, a);
    const auto lb = line_coords(space, b);
    if (la && lb) {
        std::vector<std::size_t> order(b.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return (*lb)[x] < (*lb)[y]; });
        std::vector<double> sorted(b.size());
        for (std::size_t k = 0; k < b.size(); ++k) sorted[k] = (*lb)[order[k]];
        for (std::size_t i = 0; i < a.size(); ++i) {
            const double x = (*la)[i];
            auto it = std::upper_bound(sorted.begin(), sorted.end(), x - radius);
            for (; it != sorted.end() && *it < x + radius; ++it) {
                const double d = std::abs(*it - x);
                if (d < radius) fn(i, order[static_cast<std::size_t>(it - sorted.begin())], d);
            }
        }
        return;
    }
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            const double d = space.distance(a[i], b[j]);
            if (d < radius) fn(i, j, d);
        }
    }
}

std::vector<SpacePoint> ball(const GeodesicSpace& space, const std::vector<SpacePoint>& pts, const SpacePoint& c,
                             double r) {
    std::vector<SpacePoint> out;
    for (const SpacePoint& p : pts) {
        if (space.distance(p, c) <= r) out.push_back(p);
    }
    return out;
}

// Largest distance from a point of `from` to the set `to` (infinite when `to` is empty).
double excess(const GeodesicSpace& space, const std::vector<SpacePoint>& from, const std::vector<SpacePoint>& to) {
    double worst = 0.0;
    for (const SpacePoint& a : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const SpacePoint& b : to) best = std::min(best, space.distance(a, b));
        worst = std::max(worst, best);
    }
    return worst;
}

} // namespace

double hausdorff_distance(const GeodesicSpace& ambient, const std::vector<SpacePoint>& a,
                          const std::vector<SpacePoint>& b) {
    require(!a.empty() && !b.empty(), ErrorCode::invalid_input, "Hausdorff distance needs non-empty sets");
    return std::max(directed_hausdorff(ambient, a, b), directed_hausdorff(ambient, b, a));
}

void validate_resolution(const FiniteResolution& r) {
    require(r.ambient != nullptr, ErrorCode::invalid_input, "resolution has no ambient space");
    const double d = hausdorff_distance(*r.ambient, r.set_a, r.set_b);
    require(d < r.delta, ErrorCode::invalid_input,
            "Hausdorff distance " + std::to_string(d) + " is not below delta " + std::to_string(r.delta));
}

void validate_sequence(const ConvergingSequence& seq) {
    require(seq.ambient != nullptr, ErrorCode::invalid_input, "sequence has no ambient space");
    require(!seq.stages.empty(), ErrorCode::invalid_input, "sequence has no stages");
    require(seq.limit_points.size() == seq.limit_weights.size() && !seq.limit_points.empty(),
            ErrorCode::invalid_input, "limit points and weights must be parallel and non-empty");
    require(set_diameter(*seq.ambient, seq.limit_points) <= seq.diameter_bound, ErrorCode::invalid_input,
            "limit diameter exceeds b");
    for (double u : seq.limit_weights) {
        require(u >= 0.0 && u <= seq.weight_bound, ErrorCode::invalid_input, "limit weight outside [0, m]");
    }
    double previous = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < seq.stages.size(); ++n) {
        const SequenceStage& s = seq.stages[n];
        const std::string id = "stage " + std::to_string(n);
        require(s.points.size() == s.weights.size() && !s.points.empty(), ErrorCode::invalid_input,
                id + ": points and weights must be parallel and non-empty");
        require(s.delta < previous, ErrorCode::invalid_input, id + ": deltas must be strictly decreasing");
        previous = s.delta;
        for (double u : s.weights) {
            require(u >= 0.0 && u <= seq.weight_bound, ErrorCode::invalid_input, id + ": weight outside [0, m]");
        }
        require(hausdorff_distance(*seq.ambient, s.points, seq.limit_points) < s.delta, ErrorCode::invalid_input,
                id + ": Hausdorff distance to the limit is not below delta");
        require(set_diameter(*seq.ambient, s.points) <= seq.diameter_bound, ErrorCode::invalid_input, id + ": diameter exceeds b");
    }
}

CheckRecord weight_convergence_check(const ConvergingSequence& seq, double epsilon, std::size_t first_stage) {
    require(std::isfinite(epsilon) && epsilon > 0.0, ErrorCode::invalid_input, "epsilon must be positive");
    double worst = 0.0;
    std::size_t violations = 0;
    std::size_t pairs = 0;
    for (std::size_t n = first_stage; n < seq.stages.size(); ++n) {
        const SequenceStage& s = seq.stages[n];
        for_close_pairs(*seq.ambient, s.points, seq.limit_points, s.delta, [&](std::size_t i, std::size_t j, double) {
            const double gap = std::abs(s.weights[i] - seq.limit_weights[j]);
            ++pairs;
            worst = std::max(worst, gap);
            if (!(gap < epsilon)) ++violations;
        });
    }
    CheckRecord rec;
    rec.suite = "weight-convergence";
    rec.bound = epsilon;
    rec.measured = worst;
    rec.pass = violations == 0;
    rec.with("pairs", static_cast<double>(pairs)).with("violations", static_cast<double>(violations));
    return rec;
}

bool LimitReport::all_pass() const {
    return std::all_of(ladder.begin(), ladder.end(), [](const CheckRecord& r) { return r.pass; }) &&
           std::all_of(pointed.begin(), pointed.end(), [](const CheckRecord& r) { return r.pass; });
}

LimitReport barycenter_limit(const ConvergingSequence& seq, double tol) {
    require(seq.ambient != nullptr && !seq.ambient->curvature().positive(), ErrorCode::unsupported,
            "barycenter limits are only supported in CAT(0) spaces");
    validate_sequence(seq);
    const GeodesicSpace& space = *seq.ambient;

    LimitReport report;
    const BarycenterResult limit = barycenter(WeightedPointSet{seq.ambient, seq.limit_points, seq.limit_weights}, tol);
    report.limit_barycenter = limit.barycenter;
    for (const SequenceStage& s : seq.stages) {
        const BarycenterResult r = barycenter(WeightedPointSet{seq.ambient, s.points, s.weights}, tol);
        report.distances.push_back(space.distance(r.barycenter, limit.barycenter));
        report.hausdorff.push_back(hausdorff_distance(space, s.points, seq.limit_points));

        // Closed balls about the barycenters, restricted to the finite sets.
        // Each ball lies within delta_n of the other one enlarged by
        // delta_n + d(q_n, q).
        const double slack = s.delta + report.distances.back();
        for (double radius : {0.1, 0.25, 0.5}) {
            const double rr = radius * seq.diameter_bound;
            const auto bn = ball(space, s.points, r.barycenter, rr);
            const auto bl = ball(space, seq.limit_points, limit.barycenter, rr);
            if (bn.empty() && bl.empty()) continue;
            const double forward = excess(space, bn, ball(space, seq.limit_points, limit.barycenter, rr + slack));
            const double backward = excess(space, bl, ball(space, s.points, r.barycenter, rr + slack));
            CheckRecord rec;
            rec.suite = "pointed-ball";
            rec.instance = "stage " + std::to_string(report.distances.size() - 1);
            rec.bound = s.delta;
            rec.measured = std::max(forward, backward);
            rec.pass = rec.measured < rec.bound;
            rec.with("radius", rr).with("slack", slack);
            report.pointed.push_back(rec);
        }
    }

    const double diam = set_diameter(space, seq.limit_points);
    for (double factor : {0.1, 0.01, 0.001}) {
        const double s = factor * diam;
        // First stage from which every later distance is below s.
        std::size_t from = report.distances.size();
        while (from > 0 && report.distances[from - 1] < s) --from;
        CheckRecord rec;
        rec.suite = "limit-ladder";
        rec.instance = "s=" + std::to_string(factor) + "*diam";
        rec.bound = s;
        rec.measured = report.distances.back();
        rec.pass = from < report.distances.size();
        rec.with("first_stage", static_cast<double>(from));
        report.ladder.push_back(rec);
    }
    return report;
}

double resolution_epsilon(const FiniteResolution& r, const std::vector<double>& f, const std::vector<double>& g) {
    double worst = 0.0;
    for_close_pairs(*r.ambient, r.set_a, r.set_b, r.delta,
                    [&](std::size_t i, std::size_t j, double) { worst = std::max(worst, std::abs(f[i] - g[j])); });
    return std::nextafter(worst, std::numeric_limits<double>::infinity()) + 1e-15;
}

CheckRecord resolution_bound_check(const FiniteResolution& r, const std::vector<double>& f, const std::vector<double>& g,
                      double epsilon, std::uint64_t seed, std::size_t max_quadruples) {
    validate_resolution(r);
    require(f.size() == r.set_a.size() && g.size() == r.set_b.size(), ErrorCode::invalid_input,
            "function values must be parallel to the resolution sets");
    const GeodesicSpace& space = *r.ambient;

    struct Pair {
        std::size_t x;
        std::size_t y;
    };
    std::vector<Pair> close;
    for_close_pairs(space, r.set_a, r.set_b, r.delta, [&](std::size_t i, std::size_t j, double) {
        require(std::abs(f[i] - g[j]) < epsilon, ErrorCode::hypothesis_violation,
                "|f(x) - g(y)| >= epsilon for a delta-close pair");
        close.push_back({i, j});
    });

    const double b = std::max(diameter(space, r.set_a), diameter(space, r.set_b));
    double m = 0.0;
    for (double v : f) m = std::max(m, v);
    for (double v : g) m = std::max(m, v);
    const double delta_prime = 2.0 * r.delta * m + epsilon * b + 2.0 * r.delta * epsilon;

    double worst = 0.0;
    std::size_t checked = 0;
    auto check = [&](const Pair& p, const Pair& q) {
        const double lhs = f[q.x] * space.distance(r.set_a[p.x], r.set_a[q.x]);
        const double rhs = g[q.y] * space.distance(r.set_b[p.y], r.set_b[q.y]);
        worst = std::max(worst, std::abs(lhs - rhs));
        ++checked;
    };
    if (close.size() * close.size() <= max_quadruples) {
        for (const Pair& p : close) {
            for (const Pair& q : close) check(p, q);
        }
    } else {
        Rng rng(seed);
        for (std::size_t s = 0; s < max_quadruples; ++s) check(close[rng.index(close.size())], close[rng.index(close.size())]);
    }

    CheckRecord rec;
    rec.suite = "resolution-bound";
    rec.bound = delta_prime;
    rec.measured = worst;
    rec.pass = worst <= delta_prime;
    rec.with("delta", r.delta).with("epsilon", epsilon).with("b", b).with("m", m).with(
        "quadruples", static_cast<double>(checked));
    return rec;
}

ConvergingSequence interval_grid_sequence(const std::function<double(double)>& u, int first_level, int last_level,
                                          int limit_level) {
    require(first_level >= 0 && first_level <= last_level && last_level < limit_level && limit_level <= 24,
            ErrorCode::invalid_input, "grid levels must satisfy 0 <= first <= last < limit <= 24");
    auto space = ModelSpace::euclidean(1);
    auto grid = [&](int level, std::vector<SpacePoint>& pts, std::vector<double>& w) {
        const std::size_t n = (std::size_t{1} << level) + 1;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = static_cast<double>(i) / static_cast<double>(n - 1);
            pts.push_back(euclidean_point(Eigen::VectorXd::Constant(1, x)));
            w.push_back(u(x));
        }
    };
    ConvergingSequence seq;
    seq.ambient = space;
    grid(limit_level, seq.limit_points, seq.limit_weights);
    for (int j = first_level; j <= last_level; ++j) {
        SequenceStage s;
        grid(j, s.points, s.weights);
        s.delta = std::ldexp(1.0, -j);
        seq.stages.push_back(std::move(s));
    }
    seq.diameter_bound = 1.0;
    seq.weight_bound = 0.0;
    for (double w : seq.limit_weights) seq.weight_bound = std::max(seq.weight_bound, w);
    for (const SequenceStage& s : seq.stages) {
        for (double w : s.weights) seq.weight_bound = std::max(seq.weight_bound, w);
    }
    return seq;
}

ConvergingSequence jitter_sequence(const std::vector<Eigen::VectorXd>& cloud, const std::vector<double>& weights,
                                   int levels, std::uint64_t seed) {
    require(!cloud.empty() && cloud.size() == weights.size(), ErrorCode::invalid_input,
            "cloud and weights must be parallel and non-empty");
    auto space = ModelSpace::euclidean(static_cast<int>(cloud.front().size()));
    Rng rng(seed);
    ConvergingSequence seq;
    seq.ambient = space;
    for (const auto& p : cloud) seq.limit_points.push_back(space->point(p));
    seq.limit_weights = weights;
    double b = diameter(*space, seq.limit_points);
    for (int j = 1; j <= levels; ++j) {
        SequenceStage s;
        s.delta = std::ldexp(1.0, -j);
        for (const auto& p : seq.limit_points) s.points.push_back(space->sample_near(p, 0.5 * s.delta, rng));
        s.weights = weights;
        b = std::max(b, diameter(*space, s.points));
        seq.stages.push_back(std::move(s));
    }
    seq.diameter_bound = b;
    seq.weight_bound = *std::max_element(weights.begin(), weights.end());
    return seq;
}

} // namespace catbary
