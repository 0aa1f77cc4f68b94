#include "active_set.hpp"

#include "model_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <set>

namespace catbary::detail {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double kThresholds[] = {1e-6, 1e-4, 1e-3, 1e-2, 0.05, 0.2, 1.0};
constexpr std::size_t kMaxCandidates = 10;
constexpr int kNewtonIters = 60;

struct Candidate {
    VectorXd x;
    double radius = 0.0;
    double residual = 0.0;
};

VectorXd unit_geodesic(ModelKind kind, const VectorXd& a, const VectorXd& b, double t) {
    if (kind == ModelKind::euclidean) return a + t * (b - a);
    const double theta = unit_distance(kind, a, b);
    VectorXd y;
    if (theta < 1e-8) {
        y = a + t * (b - a);
    } else if (kind == ModelKind::sphere) {
        y = (std::sin((1.0 - t) * theta) * a + std::sin(t * theta) * b) / std::sin(theta);
    } else {
        y = (std::sinh((1.0 - t) * theta) * a + std::sinh(t * theta) * b) / std::sinh(theta);
    }
    normalize(kind, y);
    return y;
}

class SubsetSolver {
public:
    SubsetSolver(ModelKind kind, const std::vector<VectorXd>& points, const std::vector<double>& weights)
        : kind_(kind), points_(points), weights_(weights) {}

    std::optional<Candidate> solve(const std::vector<std::size_t>& subset, const VectorXd& x0) const {
        if (subset.size() == 2) return solve_pair(subset[0], subset[1]);
        return solve_newton(subset, x0);
    }

    // Multipliers mu >= 0, sum 1, with sum mu_i u_i grad d_i = 0, and no
    // point outside the subset exceeding the radius.
    bool certify(const std::vector<std::size_t>& subset, const Candidate& c) const {
        const std::size_t m = subset.size();
        std::vector<VectorXd> w;
        w.reserve(m);
        for (std::size_t i : subset) {
            const double d = unit_distance(kind_, c.x, points_[i]);
            if (!(d > 0.0)) return false;
            w.push_back(weights_[i] * unit_distance_gradient(kind_, c.x, points_[i], d));
        }
        MatrixXd kkt = MatrixXd::Zero(static_cast<Eigen::Index>(m + 1), static_cast<Eigen::Index>(m + 1));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                kkt(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = 2.0 * form(kind_, w[i], w[j]);
            }
            kkt(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(m)) = 1.0;
            kkt(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(i)) = 1.0;
        }
        VectorXd rhs = VectorXd::Zero(static_cast<Eigen::Index>(m + 1));
        rhs[static_cast<Eigen::Index>(m)] = 1.0;
        const VectorXd sol = kkt.completeOrthogonalDecomposition().solve(rhs);

        VectorXd combo = VectorXd::Zero(c.x.size());
        for (std::size_t i = 0; i < m; ++i) {
            const double mu = sol[static_cast<Eigen::Index>(i)];
            if (!(mu >= -1e-9)) return false;
            combo += mu * w[i];
        }
        const double stationarity = std::sqrt(std::max(0.0, form(kind_, combo, combo)));
        if (!(stationarity <= 1e-8)) return false;

        const double limit = c.radius * (1.0 + 1e-12) + 1e-300;
        for (std::size_t j = 0; j < points_.size(); ++j) {
            if (weights_[j] * unit_distance(kind_, c.x, points_[j]) > limit) return false;
        }
        return true;
    }

private:
    std::optional<Candidate> solve_pair(std::size_t i, std::size_t j) const {
        const double D = unit_distance(kind_, points_[i], points_[j]);
        const double ui = weights_[i];
        const double uj = weights_[j];
        Candidate c;
        c.x = unit_geodesic(kind_, points_[i], points_[j], uj / (ui + uj));
        c.radius = std::max(ui * unit_distance(kind_, c.x, points_[i]), uj * unit_distance(kind_, c.x, points_[j]));
        c.residual = std::abs(ui * unit_distance(kind_, c.x, points_[i]) - uj * unit_distance(kind_, c.x, points_[j]));
        if (!(D > 0.0) || !c.x.allFinite()) return std::nullopt;
        return c;
    }

    std::optional<VectorXd> embed(const VectorXd& beta, const std::vector<std::size_t>& subset, double& scale) const {
        VectorXd y = VectorXd::Zero(points_[subset[0]].size());
        for (std::size_t a = 0; a < subset.size(); ++a) y += beta[static_cast<Eigen::Index>(a)] * points_[subset[a]];
        switch (kind_) {
        case ModelKind::euclidean:
            scale = 1.0;
            return y;
        case ModelKind::sphere:
            scale = y.norm();
            break;
        case ModelKind::hyperboloid: {
            const double q = -form(kind_, y, y);
            if (!(q > 0.0) || !(y[y.size() - 1] > 0.0)) return std::nullopt;
            scale = std::sqrt(q);
            break;
        }
        }
        if (!(scale > 1e-300) || !std::isfinite(scale)) return std::nullopt;
        return VectorXd(y / scale);
    }

    std::optional<VectorXd> residuals(const VectorXd& z, const std::vector<std::size_t>& subset) const {
        const std::size_t m = subset.size();
        const auto mi = static_cast<Eigen::Index>(m);
        double scale = 0.0;
        const auto x = embed(z.head(mi), subset, scale);
        if (!x) return std::nullopt;
        VectorXd f(mi + 1);
        for (std::size_t a = 0; a < m; ++a) {
            f[static_cast<Eigen::Index>(a)] = weights_[subset[a]] * unit_distance(kind_, *x, points_[subset[a]]) - z[mi];
        }
        f[mi] = z.head(mi).sum() - 1.0;
        return f;
    }

    std::optional<Candidate> solve_newton(const std::vector<std::size_t>& subset, const VectorXd& x0) const {
        const std::size_t m = subset.size();
        const auto mi = static_cast<Eigen::Index>(m);
        const auto ambient = x0.size();

        // Start from the least-squares representation of x0 in the span.
        MatrixXd P(ambient, mi);
        for (std::size_t a = 0; a < m; ++a) P.col(static_cast<Eigen::Index>(a)) = points_[subset[a]];
        VectorXd beta;
        if (kind_ == ModelKind::euclidean) {
            MatrixXd A(ambient + 1, mi);
            A.topRows(ambient) = P;
            A.bottomRows(1).setOnes();
            VectorXd b(ambient + 1);
            b.head(ambient) = x0;
            b[ambient] = 1.0;
            beta = A.completeOrthogonalDecomposition().solve(b);
        } else {
            beta = P.completeOrthogonalDecomposition().solve(x0);
            const double s = beta.sum();
            if (!(s > 0.0)) beta = VectorXd::Constant(mi, 1.0 / static_cast<double>(m));
            else beta /= s;
        }

        VectorXd z(mi + 1);
        z.head(mi) = beta;
        {
            double scale = 0.0;
            const auto x = embed(beta, subset, scale);
            if (!x) return std::nullopt;
            double r = 0.0;
            for (std::size_t a = 0; a < m; ++a) r = std::max(r, weights_[subset[a]] * unit_distance(kind_, *x, points_[subset[a]]));
            z[mi] = r;
        }

        auto f = residuals(z, subset);
        if (!f) return std::nullopt;
        for (int iter = 0; iter < kNewtonIters; ++iter) {
            const double norm = f->lpNorm<Eigen::Infinity>();
            if (norm <= 1e-15 * std::max(1.0, z[mi])) break;

            double scale = 0.0;
            const auto x = embed(z.head(mi), subset, scale);
            if (!x) return std::nullopt;
            MatrixXd J = MatrixXd::Zero(mi + 1, mi + 1);
            std::vector<VectorXd> dx(m);
            for (std::size_t b = 0; b < m; ++b) {
                const VectorXd& p = points_[subset[b]];
                switch (kind_) {
                case ModelKind::euclidean:
                    dx[b] = p;
                    break;
                case ModelKind::sphere:
                    dx[b] = (p - *x * x->dot(p)) / scale;
                    break;
                case ModelKind::hyperboloid:
                    dx[b] = (p + *x * form(kind_, *x, p)) / scale;
                    break;
                }
            }
            for (std::size_t a = 0; a < m; ++a) {
                const VectorXd& p = points_[subset[a]];
                const double d = unit_distance(kind_, *x, p);
                if (!(d > 0.0)) return std::nullopt;
                const VectorXd g = weights_[subset[a]] * unit_distance_gradient(kind_, *x, p, d);
                for (std::size_t b = 0; b < m; ++b) {
                    J(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = form(kind_, g, dx[b]);
                }
                J(static_cast<Eigen::Index>(a), mi) = -1.0;
            }
            J.row(mi).head(mi).setOnes();

            const auto qr = J.colPivHouseholderQr();
            if (qr.rank() < mi + 1) return std::nullopt;
            const VectorXd step = qr.solve(-*f);
            if (!step.allFinite()) return std::nullopt;

            double lambda = 1.0;
            bool accepted = false;
            for (int back = 0; back < 40; ++back) {
                const VectorXd trial = z + lambda * step;
                const auto ft = residuals(trial, subset);
                if (ft && ft->lpNorm<Eigen::Infinity>() < norm) {
                    z = trial;
                    f = ft;
                    accepted = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!accepted) break;
        }

        Candidate c;
        double scale = 0.0;
        const auto x = embed(z.head(mi), subset, scale);
        if (!x) return std::nullopt;
        c.x = *x;
        c.residual = f->lpNorm<Eigen::Infinity>();
        for (std::size_t a = 0; a < m; ++a) {
            c.radius = std::max(c.radius, weights_[subset[a]] * unit_distance(kind_, c.x, points_[subset[a]]));
        }
        if (!(c.residual <= 1e-12 * std::max(1.0, c.radius))) return std::nullopt;
        return c;
    }

    ModelKind kind_;
    const std::vector<VectorXd>& points_;
    const std::vector<double>& weights_;
};

template <class Fn>
bool for_each_subset(const std::vector<std::size_t>& pool, std::size_t size, std::vector<std::size_t>& current,
                     std::size_t start, Fn&& fn) {
    if (current.size() == size) return fn(current);
    for (std::size_t i = start; i < pool.size(); ++i) {
        current.push_back(pool[i]);
        if (for_each_subset(pool, size, current, i + 1, fn)) return true;
        current.pop_back();
    }
    return false;
}

} // namespace

double unit_objective(ModelKind kind, const std::vector<VectorXd>& points, const std::vector<double>& weights,
                      const VectorXd& x) {
    double f = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) f = std::max(f, weights[i] * unit_distance(kind, x, points[i]));
    return f;
}

ActiveSetOutcome refine_active_set(ModelKind kind, int dim, const std::vector<VectorXd>& points,
                                   const std::vector<double>& weights, const VectorXd& x0) {
    ActiveSetOutcome out;
    out.x = x0;
    out.radius = unit_objective(kind, points, weights, x0);
    if (points.size() < 2) return out;

    std::vector<double> f(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) f[i] = weights[i] * unit_distance(kind, x0, points[i]);
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return f[a] > f[b]; });
    const double top = f[order[0]];

    const SubsetSolver solver(kind, points, weights);
    std::set<std::vector<std::size_t>> tried;
    const std::size_t max_size = static_cast<std::size_t>(dim) + 1;

    for (double theta : kThresholds) {
        std::vector<std::size_t> pool;
        for (std::size_t i : order) {
            if (f[i] < top * (1.0 - theta) || pool.size() == kMaxCandidates) break;
            pool.push_back(i);
        }
        std::sort(pool.begin(), pool.end());
        for (std::size_t size = 2; size <= std::min(max_size, pool.size()); ++size) {
            std::vector<std::size_t> current;
            const bool done = for_each_subset(pool, size, current, 0, [&](const std::vector<std::size_t>& subset) {
                if (!tried.insert(subset).second) return false;
                ++out.solves;
                const auto cand = solver.solve(subset, x0);
                if (!cand) return false;
                if (solver.certify(subset, *cand)) {
                    out.x = cand->x;
                    out.radius = unit_objective(kind, points, weights, cand->x);
                    out.residual = cand->residual;
                    out.certified = true;
                    return true;
                }
                const double value = unit_objective(kind, points, weights, cand->x);
                if (value < out.radius) {
                    out.x = cand->x;
                    out.radius = value;
                    out.residual = cand->residual;
                }
                return false;
            });
            if (done) return out;
        }
    }
    return out;
}

} // namespace catbary::detail
