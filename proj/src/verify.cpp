#include "catbary/verify.hpp"

#include "catbary/corpus.hpp"
#include "catbary/error.hpp"
#include "catbary/gh_limits.hpp"
#include "catbary/retraction.hpp"
#include "catbary/stability.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>
#include <numeric>

namespace catbary {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

constexpr double pi = std::numbers::pi;

std::size_t pick(const VerifyOptions& o, std::size_t fallback) { return o.count == 0 ? fallback : o.count; }

CheckRecord named(CheckRecord rec, const std::string& instance) {
    rec.instance = instance;
    return rec;
}

template <class Fn>
void for_each_instance(const VerifyOptions& o, std::size_t fallback, bool with_e3, Fn&& fn) {
    for (CorpusSpace kind : corpus_spaces()) {
        if (kind == CorpusSpace::e3 && !with_e3) continue;
        for (const CorpusInstance& inst : make_corpus(kind, pick(o, fallback), o.seed)) fn(kind, inst);
    }
}

std::vector<CheckRecord> jung_suite(const VerifyOptions& o) {
    Rng rng(o.seed);
    std::vector<CheckRecord> out;
    const std::size_t count = pick(o, 100);
    for (std::size_t i = 0; i < count; ++i) {
        const int dim = i % 2 == 0 ? 2 : 3;
        const std::size_t size = 2 + rng.index(29);
        out.push_back(named(jung_verify(random_cloud(dim, size, rng)), "E" + std::to_string(dim) + "-" + std::to_string(i)));
    }
    return out;
}

std::vector<CheckRecord> scaling_suite(const VerifyOptions& o) {
    std::vector<CheckRecord> out;
    Rng rng(o.seed);
    for_each_instance(o, 10, true, [&](CorpusSpace, const CorpusInstance& inst) {
        const double lambda = std::exp(rng.uniform(std::log(0.1), std::log(10.0)));
        const BarycenterResult a = barycenter(inst.set, o.tol);
        WeightedPointSet scaled = inst.set;
        for (double& u : scaled.weights) u *= lambda;
        const BarycenterResult b = barycenter(scaled, o.tol);
        CheckRecord rec;
        rec.suite = "scaling";
        rec.instance = inst.id;
        rec.bound = 1e-9;
        rec.measured = a.baryradius > 0.0 ? std::abs(b.baryradius / a.baryradius - lambda) : b.baryradius;
        const double moved = inst.set.space->distance(a.barycenter, b.barycenter);
        rec.pass = rec.measured <= rec.bound && moved <= 2.0 * o.tol;
        rec.with("lambda", lambda).with("displacement", moved);
        out.push_back(rec);
    });
    return out;
}

std::vector<CheckRecord> zero_weight_suite(const VerifyOptions& o) {
    std::vector<CheckRecord> out;
    Rng rng(o.seed);
    for_each_instance(o, 10, true, [&](CorpusSpace, const CorpusInstance& inst) {
        const BarycenterResult a = barycenter(inst.set, o.tol);
        WeightedPointSet padded = inst.set;
        const std::size_t extra = 1 + rng.index(3);
        for (std::size_t j = 0; j < extra; ++j) {
            const std::size_t at = rng.index(padded.points.size() + 1);
            const SpacePoint p = inst.set.space->sample_near(inst.set.points[rng.index(inst.set.points.size())], 0.05, rng);
            padded.points.insert(padded.points.begin() + static_cast<std::ptrdiff_t>(at), p);
            padded.weights.insert(padded.weights.begin() + static_cast<std::ptrdiff_t>(at), 0.0);
        }
        const BarycenterResult b = barycenter(padded, o.tol);
        CheckRecord rec;
        rec.suite = "zero-weight";
        rec.instance = inst.id;
        rec.bound = 0.0;
        rec.measured = inst.set.space->distance(a.barycenter, b.barycenter) + std::abs(a.baryradius - b.baryradius);
        rec.pass = rec.measured <= rec.bound;
        rec.with("zero_points", static_cast<double>(extra));
        out.push_back(rec);
    });
    return out;
}

std::vector<CheckRecord> containment_suite(const VerifyOptions& o) {
    std::vector<CheckRecord> out;
    Rng rng(o.seed);
    for_each_instance(o, 10, true, [&](CorpusSpace, const CorpusInstance& inst) {
        const GeodesicSpace& space = *inst.set.space;
        const BarycenterResult q = barycenter(inst.set, o.tol);
        const BarycenterResult c = circumcenter(inst.set.space, inst.set.points, o.tol);

        CheckRecord ball;
        ball.suite = "circumball";
        ball.instance = inst.id;
        ball.bound = o.tol;
        ball.measured = space.distance(q.barycenter, c.barycenter) - c.baryradius;
        ball.pass = ball.measured <= ball.bound;
        ball.with("circumradius", c.baryradius);
        out.push_back(ball);

        // Covering balls about random centers near the circumcenter.
        CheckRecord cover;
        cover.suite = "covering-balls";
        cover.instance = inst.id;
        cover.bound = o.tol;
        cover.measured = -std::numeric_limits<double>::infinity();
        for (int trial = 0; trial < 8; ++trial) {
            const SpacePoint x = space.sample_near(c.barycenter, std::max(c.baryradius, 1e-3), rng);
            double r = 0.0;
            for (const SpacePoint& p : inst.set.points) r = std::max(r, space.distance(x, p));
            r = r * (1.0 + 1e-6) + 1e-12;
            if (!(r < 0.5 * space.curvature().d_cap())) continue;
            cover.measured = std::max(cover.measured, space.distance(q.barycenter, x) - r);
        }
        cover.pass = cover.measured <= cover.bound;
        out.push_back(cover);

        if (const ModelSpace* m = space.model_structure(); m != nullptr && m->kind() == ModelKind::euclidean) {
            std::vector<VectorXd> pts;
            for (const SpacePoint& p : inst.set.points) pts.push_back(as_model(p).coords());
            CheckRecord hull;
            hull.suite = "convex-hull";
            hull.instance = inst.id;
            hull.bound = o.tol;
            hull.measured = hull_distance(pts, as_model(q.barycenter).coords());
            hull.pass = hull.measured <= hull.bound;
            out.push_back(hull);
        }
    });
    return out;
}

std::vector<CheckRecord> equivariance_suite(const VerifyOptions& o) {
    std::vector<CheckRecord> out;
    Rng rng(o.seed);
    for_each_instance(o, 10, true, [&](CorpusSpace kind, const CorpusInstance& inst) {
        const GeodesicSpace& space = *inst.set.space;
        const IsometryDescription g = random_isometry(kind, rng);
        const BarycenterResult a = barycenter(inst.set, o.tol);
        WeightedPointSet moved = inst.set;
        for (SpacePoint& p : moved.points) p = apply_isometry(space, g, p);
        const BarycenterResult b = barycenter(moved, o.tol);
        CheckRecord rec;
        rec.suite = "equivariance";
        rec.instance = inst.id;
        rec.bound = 10.0 * o.tol;
        rec.measured = space.distance(apply_isometry(space, g, a.barycenter), b.barycenter);
        rec.pass = rec.measured <= rec.bound;
        out.push_back(rec);
    });
    return out;
}

std::vector<CheckRecord> oracle_suite(const VerifyOptions& o) {
    std::vector<CheckRecord> out;
    for_each_instance(o, 50, false, [&](CorpusSpace, const CorpusInstance& inst) {
        const BarycenterResult s = barycenter(inst.set, o.tol);
        const BarycenterResult g = oracle_grid(inst.set);
        const bool tree = inst.set.space->tree_structure() != nullptr;
        CheckRecord rec;
        rec.suite = "oracle";
        rec.instance = inst.id;
        rec.measured = std::abs(objective(inst.set, s.barycenter) - objective(inst.set, g.barycenter));
        rec.bound = tree ? 1e-9 : 1e-4 * (1.0 + s.baryradius);
        rec.pass = rec.measured <= rec.bound;
        rec.with("solver_radius", s.baryradius).with("oracle_radius", g.baryradius);
        out.push_back(rec);
    });
    return out;
}

std::vector<CheckRecord> continuity_suite(const VerifyOptions& o) {
    std::vector<CheckRecord> out;
    ContinuityOptions opts;
    opts.seed = o.seed;
    opts.trials = 20;
    opts.bisection_steps = 4;
    for_each_instance(o, 2, true, [&](CorpusSpace, const CorpusInstance& inst) {
        out.push_back(named(barycenter_continuity_check(inst.set, 1e-2, opts), inst.id));
    });
    return out;
}

std::vector<CheckRecord> stability_suite(const VerifyOptions& o) {
    std::vector<CheckRecord> out;
    Rng rng(o.seed);
    for_each_instance(o, 10, true, [&](CorpusSpace, const CorpusInstance& inst) {
        const GeodesicSpace& space = *inst.set.space;
        const double delta = 1e-3;

        WeightedPointSet w2 = inst.set;
        for (double& u : w2.weights) u = std::max(0.0, u + rng.uniform(-1.0, 1.0) * 0.999 * delta);
        out.push_back(named(radius_lipschitz_check(inst.set, w2, delta), inst.id));

        const DeltaFunction f = jitter(space, inst.set.points, delta, rng);
        out.push_back(named(point_perturbation_check(inst.set, f), inst.id));

        FiniteResolution res{inst.set.space, inst.set.points, f.images, delta};
        std::vector<double> g = inst.set.weights;
        for (double& u : g) u += rng.uniform(-1.0, 1.0) * 1e-2;
        const double eps = resolution_epsilon(res, inst.set.weights, g);
        out.push_back(named(resolution_bound_check(res, inst.set.weights, g, eps, o.seed), inst.id));
    });
    return out;
}

// Orbit-constant configurations with their symmetry groups.
struct SymmetricInstance {
    std::string id;
    WeightedPointSet set;
    std::vector<IsometryDescription> group;
};

MatrixXd plane_rotation(int size, int first, double angle) {
    MatrixXd r = MatrixXd::Identity(size, size);
    r(first, first) = std::cos(angle);
    r(first, first + 1) = -std::sin(angle);
    r(first + 1, first) = std::sin(angle);
    r(first + 1, first + 1) = std::cos(angle);
    return r;
}

std::vector<SymmetricInstance> symmetric_instances(const VerifyOptions& o) {
    Rng rng(o.seed);
    std::vector<SymmetricInstance> out;
    const std::size_t count = pick(o, 5);
    for (std::size_t i = 0; i < count; ++i) {
        const std::string tag = "-" + std::to_string(i);
        const std::size_t orbits = 1 + rng.index(2);

        {  // Regular pentagons about a random center in E^2.
            auto space = ModelSpace::euclidean(2);
            SymmetricInstance s{"pentagon-E2" + tag, {space, {}, {}}, {}};
            const VectorXd c = VectorXd::NullaryExpr(2, [&] { return rng.normal(); });
            for (std::size_t k = 0; k < orbits; ++k) {
                const double radius = rng.uniform(0.2, 2.0);
                const double phase = rng.uniform(0.0, 2.0 * pi);
                const double u = rng.uniform(0.2, 3.0);
                for (int j = 0; j < 5; ++j) {
                    const double t = phase + 2.0 * pi * j / 5.0;
                    s.set.points.push_back(euclidean_point(c + radius * VectorXd{{std::cos(t), std::sin(t)}}));
                    s.set.weights.push_back(u);
                }
            }
            for (int j = 1; j < 5; ++j) {
                const MatrixXd r = plane_rotation(2, 0, 2.0 * pi * j / 5.0);
                s.group.push_back(EuclideanMotion{r, c - r * c});
            }
            out.push_back(std::move(s));
        }
        {  // Rings about the base point of S^2.
            auto space = ModelSpace::sphere(2, 1.0);
            SymmetricInstance s{"ring-S2" + tag, {space, {}, {}}, {}};
            for (std::size_t k = 0; k < orbits; ++k) {
                const double alpha = rng.uniform(0.05, 0.35);
                const double phase = rng.uniform(0.0, 2.0 * pi);
                const double u = rng.uniform(0.2, 3.0);
                for (int j = 0; j < 5; ++j) {
                    const double t = phase + 2.0 * pi * j / 5.0;
                    s.set.points.push_back(sphere_point(
                        VectorXd{{std::cos(alpha), std::sin(alpha) * std::cos(t), std::sin(alpha) * std::sin(t)}}));
                    s.set.weights.push_back(u);
                }
            }
            s.group.push_back(SphereRotation{plane_rotation(3, 1, 2.0 * pi / 5.0)});
            out.push_back(std::move(s));
        }
        {  // Rings about the base point of H^2.
            auto space = ModelSpace::hyperbolic(2, -1.0);
            SymmetricInstance s{"ring-H2" + tag, {space, {}, {}}, {}};
            for (std::size_t k = 0; k < orbits; ++k) {
                const double rho = rng.uniform(0.1, 1.0);
                const double phase = rng.uniform(0.0, 2.0 * pi);
                const double u = rng.uniform(0.2, 3.0);
                for (int j = 0; j < 5; ++j) {
                    const double t = phase + 2.0 * pi * j / 5.0;
                    s.set.points.push_back(hyperboloid_lift(std::sinh(rho) * VectorXd{{std::cos(t), std::sin(t)}}));
                    s.set.weights.push_back(u);
                }
            }
            s.group.push_back(HyperbolicIsometry{plane_rotation(3, 0, 2.0 * pi / 5.0)});
            out.push_back(std::move(s));
        }
        {  // Star legs at a common distance, generated by a 5-cycle and a transposition.
            auto space = corpus_space(CorpusSpace::star_tree);
            const RTree& tree = space->tree_structure()->tree();
            SymmetricInstance s{"star-tree" + tag, {space, {}, {}}, {}};
            for (std::size_t k = 0; k < orbits; ++k) {
                const double t = rng.uniform(0.05, 1.0);
                const double u = rng.uniform(0.2, 3.0);
                for (std::size_t e = 0; e < 5; ++e) {
                    s.set.points.push_back(tree.point(e, t));
                    s.set.weights.push_back(u);
                }
            }
            s.group.push_back(TreeAutomorphism{{0, 2, 3, 4, 5, 1}});
            s.group.push_back(TreeAutomorphism{{0, 2, 1, 3, 4, 5}});
            out.push_back(std::move(s));
        }
        {  // Mirror pairs on the symmetric path.
            auto space = corpus_space(CorpusSpace::path_tree);
            const RTree& tree = space->tree_structure()->tree();
            const double starts[] = {0.0, 1.0, 3.0, 5.0};
            auto at = [&](double x) {
                std::size_t e = 0;
                while (e + 1 < 4 && x > starts[e + 1]) ++e;
                return tree.point(e, x - starts[e]);
            };
            SymmetricInstance s{"path-tree" + tag, {space, {}, {}}, {}};
            for (std::size_t k = 0; k < orbits; ++k) {
                const double x = rng.uniform(0.0, 2.9);
                const double u = rng.uniform(0.2, 3.0);
                s.set.points.push_back(at(x));
                s.set.points.push_back(at(6.0 - x));
                s.set.weights.insert(s.set.weights.end(), {u, u});
            }
            s.group.push_back(TreeAutomorphism{{4, 3, 2, 1, 0}});
            out.push_back(std::move(s));
        }
        {  // Leaf-edge orbits of the binary tree under its full automorphism group.
            auto space = corpus_space(CorpusSpace::binary_tree);
            const RTree& tree = space->tree_structure()->tree();
            SymmetricInstance s{"binary-tree" + tag, {space, {}, {}}, {}};
            for (std::size_t k = 0; k < orbits; ++k) {
                const double t = rng.uniform(0.0, 0.5);
                const double u = rng.uniform(0.2, 3.0);
                for (std::size_t e = 2; e < 6; ++e) {
                    s.set.points.push_back(tree.point(e, t));
                    s.set.weights.push_back(u);
                }
            }
            s.group.push_back(TreeAutomorphism{{0, 1, 2, 4, 3, 5, 6}});
            s.group.push_back(TreeAutomorphism{{0, 2, 1, 5, 6, 3, 4}});
            out.push_back(std::move(s));
        }
    }
    return out;
}

std::vector<CheckRecord> fixed_point_suite(const VerifyOptions& o) {
    std::vector<CheckRecord> out;
    for (const SymmetricInstance& s : symmetric_instances(o)) {
        out.push_back(named(fixed_point_check(s.set, s.group, o.tol), s.id));
    }
    return out;
}

std::vector<CheckRecord> gh_suite(const VerifyOptions& o) {
    std::vector<CheckRecord> out;
    auto append = [&](const LimitReport& r, const std::string& id) {
        for (const CheckRecord& rec : r.ladder) out.push_back(named(rec, id + " " + rec.instance));
        for (const CheckRecord& rec : r.pointed) out.push_back(named(rec, id + " " + rec.instance));
    };

    const ConvergingSequence grids = interval_grid_sequence([](double x) { return x * x; }, 1, 12, 14);
    append(barycenter_limit(grids, o.tol), "interval-grid");
    // |x^2 - y^2| <= 2 |x - y| < 2 delta on [0, 1].
    const double eps = 1e-2;
    std::size_t first = 0;
    while (first < grids.stages.size() && 2.0 * grids.stages[first].delta > eps) ++first;
    out.push_back(named(weight_convergence_check(grids, eps, first), "interval-grid"));

    Rng rng(o.seed);
    const std::size_t count = pick(o, 3);
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t size = 3 + rng.index(10);
        std::vector<double> weights;
        for (std::size_t j = 0; j < size; ++j) weights.push_back(rng.uniform(0.2, 3.0));
        const ConvergingSequence seq = jitter_sequence(random_cloud(2, size, rng), weights, 16, o.seed + i);
        append(barycenter_limit(seq, o.tol), "jitter-E2-" + std::to_string(i));
    }
    return out;
}

std::vector<CheckRecord> retraction_suite(const VerifyOptions& o) {
    std::vector<CheckRecord> out;
    const std::size_t samples = pick(o, 200);
    struct Case {
        std::string id;
        ConvexTarget target;
        Window window;
        std::vector<VectorXd> boundary;
    };
    std::vector<Case> cases;
    cases.push_back({"disk", disk_target(VectorXd::Zero(2), 1.0), {VectorXd::Constant(2, -2.0), VectorXd::Constant(2, 2.0)},
                     circle_samples(VectorXd::Zero(2), 1.0, samples)});
    {
        Case c{"half-plane", half_space_target(VectorXd{{0.0, 1.0}}, 0.0),
               {VectorXd::Constant(2, -1.0), VectorXd::Constant(2, 1.0)}, {}};
        for (std::size_t i = 0; i < samples; ++i) {
            c.boundary.push_back(VectorXd{{-0.9 + 1.8 * static_cast<double>(i) / static_cast<double>(samples), 0.0}});
        }
        cases.push_back(std::move(c));
    }
    {
        Case c{"square", box_target(VectorXd::Constant(2, -0.5), VectorXd::Constant(2, 0.5)),
               {VectorXd::Constant(2, -1.5), VectorXd::Constant(2, 1.5)}, {}};
        // Perimeter walk starting at a corner, so every corner is sampled when samples % 4 == 0.
        for (std::size_t i = 0; i < samples; ++i) {
            const double t = 4.0 * static_cast<double>(i) / static_cast<double>(samples);
            const double f = t - std::floor(t);
            const int side = static_cast<int>(t);
            const VectorXd corners[] = {VectorXd{{-0.5, -0.5}}, VectorXd{{0.5, -0.5}}, VectorXd{{0.5, 0.5}},
                                        VectorXd{{-0.5, 0.5}}};
            c.boundary.push_back((1.0 - f) * corners[side] + f * corners[(side + 1) % 4]);
        }
        cases.push_back(std::move(c));
    }
    for (const Case& c : cases) {
        const BallCover cover = build_cover(c.target, c.window, 1e-3);
        out.push_back(named(retraction_identity_check(cover, 51), c.id));
        out.push_back(named(image_containment_check(cover, 51), c.id));
        for (double eps : {0.1, 0.01}) {
            ProbeReport p = continuity_probe(cover, c.boundary, eps, o.seed);
            const std::string id = c.id + " eps=" + (eps == 0.1 ? "0.1" : "0.01");
            out.push_back(named(p.modulus, id));
            out.push_back(named(p.anchor_distance, id));
        }
        out.push_back(named(local_continuity_check(cover, 1e-2, 100, o.seed), c.id));
    }
    return out;
}

CheckRecord mk_record(double k, double r, double s) {
    CheckRecord rec;
    rec.suite = "mk";
    rec.bound = 0.0;
    rec.measured = m_k_constant(CurvatureParam(k), r, s);
    rec.pass = rec.measured > rec.bound;
    rec.with("k", k).with("r", r).with("s", s);
    return rec;
}

std::vector<CheckRecord> mk_suite(const VerifyOptions& o) {
    std::vector<CheckRecord> out;
    for (double k : {-1.0, 0.0, 1.0}) {
        for (auto [r, s] : {std::pair{0.1, 0.3}, std::pair{0.3, 0.9}, std::pair{1.0, 2.0}}) {
            if (k > 0.0 && r == 1.0) continue;
            out.push_back(named(mk_record(k, r, s), "grid"));
        }
    }
    Rng rng(o.seed);
    const std::size_t count = pick(o, 20);
    for (std::size_t i = 0; i < count; ++i) {
        const double k = rng.uniform(-2.0, 2.0);
        const double cap = k > 0.0 ? 0.45 * pi / std::sqrt(k) : 3.0;
        const double s = rng.uniform(0.1, cap);
        const double r = s * rng.uniform(0.1, 0.9);
        out.push_back(named(mk_record(k, r, s), "random-" + std::to_string(i)));
    }
    return out;
}

using SuiteFn = std::function<std::vector<CheckRecord>(const VerifyOptions&)>;

const std::map<std::string, SuiteFn, std::less<>>& suite_table() {
    static const std::map<std::string, SuiteFn, std::less<>> table = {
        {"jung", jung_suite},
        {"scaling", scaling_suite},
        {"containment", containment_suite},
        {"continuity", continuity_suite},
        {"fixed-point", fixed_point_suite},
        {"gh", gh_suite},
        {"retraction", retraction_suite},
        {"mk", mk_suite},
        {"zero-weight", zero_weight_suite},
        {"equivariance", equivariance_suite},
        {"oracle", oracle_suite},
        {"stability", stability_suite},
    };
    return table;
}

} // namespace

const std::vector<std::string>& verify_suites() {
    static const std::vector<std::string> names = {"jung",        "scaling",     "containment", "continuity",
                                                   "fixed-point", "gh",          "retraction",  "mk",
                                                   "zero-weight", "equivariance", "oracle",     "stability"};
    return names;
}

std::vector<CheckRecord> run_suite(std::string_view suite, const VerifyOptions& options) {
    const auto& table = suite_table();
    const auto it = table.find(suite);
    require(it != table.end(), ErrorCode::invalid_input, "unknown suite '" + std::string(suite) + "'");
    require(options.tol > 0.0, ErrorCode::invalid_input, "tolerance must be positive");
    return it->second(options);
}

double hull_distance(const std::vector<VectorXd>& points, const VectorXd& q) {
    require(!points.empty(), ErrorCode::invalid_input, "convex hull of an empty set");
    std::vector<VectorXd> p;
    double scale = 0.0;
    for (const VectorXd& x : points) {
        p.push_back(x - q);
        scale = std::max(scale, p.back().squaredNorm());
    }
    if (scale == 0.0) return 0.0;
    const double eps = 1e-14 * scale;

    std::size_t start = 0;
    for (std::size_t i = 1; i < p.size(); ++i) {
        if (p[i].squaredNorm() < p[start].squaredNorm()) start = i;
    }
    std::vector<std::size_t> s = {start};
    std::vector<double> lambda = {1.0};
    VectorXd x = p[start];

    for (int major = 0; major < 1000; ++major) {
        std::size_t j = 0;
        for (std::size_t i = 1; i < p.size(); ++i) {
            if (x.dot(p[i]) < x.dot(p[j])) j = i;
        }
        if (x.squaredNorm() - x.dot(p[j]) <= eps || std::find(s.begin(), s.end(), j) != s.end()) break;
        s.push_back(j);
        lambda.push_back(0.0);

        while (true) {
            // Affine minimum-norm point of the current corral.
            const auto m = static_cast<Eigen::Index>(s.size());
            MatrixXd a = MatrixXd::Zero(m + 1, m + 1);
            VectorXd rhs = VectorXd::Zero(m + 1);
            for (Eigen::Index r = 0; r < m; ++r) {
                for (Eigen::Index c = 0; c < m; ++c) a(r, c) = p[s[static_cast<std::size_t>(r)]].dot(p[s[static_cast<std::size_t>(c)]]);
                a(r, m) = a(m, r) = 1.0;
            }
            rhs[m] = 1.0;
            const VectorXd alpha = a.completeOrthogonalDecomposition().solve(rhs).head(m);
            if ((alpha.array() > 1e-15).all()) {
                for (Eigen::Index r = 0; r < m; ++r) lambda[static_cast<std::size_t>(r)] = alpha[r];
                break;
            }
            double theta = 1.0;
            for (Eigen::Index r = 0; r < m; ++r) {
                const double l = lambda[static_cast<std::size_t>(r)];
                if (alpha[r] <= 1e-15 && l - alpha[r] > 0.0) theta = std::min(theta, l / (l - alpha[r]));
            }
            std::vector<std::size_t> s2;
            std::vector<double> l2;
            for (Eigen::Index r = 0; r < m; ++r) {
                const double l = theta * alpha[r] + (1.0 - theta) * lambda[static_cast<std::size_t>(r)];
                if (l > 1e-15) {
                    s2.push_back(s[static_cast<std::size_t>(r)]);
                    l2.push_back(l);
                }
            }
            if (s2.empty()) {
                s2.push_back(s.back());
                l2.push_back(1.0);
            }
            s = std::move(s2);
            lambda = std::move(l2);
        }
        const double total = std::accumulate(lambda.begin(), lambda.end(), 0.0);
        x = VectorXd::Zero(q.size());
        for (std::size_t r = 0; r < s.size(); ++r) x += (lambda[r] / total) * p[s[r]];
    }
    return x.norm();
}

} // namespace catbary
