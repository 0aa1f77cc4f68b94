#include "catbary/corpus.hpp"
#include "catbary/error.hpp"
#include "catbary/solver.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

using namespace catbary;
using testing::coord;
using testing::e;
using testing::line_points;
using testing::vec;

namespace {

// E^2 without its model structure, forcing the generic descent path.
class OpaquePlane final : public GeodesicSpace {
public:
    std::string name() const override { return "opaque plane"; }
    CurvatureParam curvature() const override { return CurvatureParam(0.0); }
    void validate(const SpacePoint& x) const override { plane_->validate(x); }
    double distance(const SpacePoint& x, const SpacePoint& y) const override { return plane_->distance(x, y); }
    SpacePoint geodesic_point(const SpacePoint& x, const SpacePoint& y, double t) const override {
        return plane_->geodesic_point(x, y, t);
    }
    SpacePoint sample_near(const SpacePoint& c, double r, Rng& rng) const override { return plane_->sample_near(c, r, rng); }

private:
    std::shared_ptr<const ModelSpace> plane_ = ModelSpace::euclidean(2);
};

WeightedPointSet example_13_4() { return {ModelSpace::euclidean(1), line_points({1, 3, 4}), {1, 4, 3}}; }

// Ternary search of a convex function of one variable.
template <class F>
double ternary_min(F f, double lo, double hi) {
    for (int i = 0; i < 300; ++i) {
        const double a = lo + (hi - lo) / 3.0;
        const double b = hi - (hi - lo) / 3.0;
        (f(a) < f(b) ? hi : lo) = f(a) < f(b) ? b : a;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("objective") {
    const WeightedPointSet w = example_13_4();
    CHECK(objective(w, e({13.0 / 4.0})) == doctest::Approx(9.0 / 4.0).epsilon(1e-15));
    CHECK(objective({ModelSpace::euclidean(1), line_points({2}), {5}}, e({2})) == 0.0);
    CHECK(objective(unit_weights(ModelSpace::euclidean(1), line_points({0, 2})), e({1})) == 1.0);
    // Ties go to the lowest index.
    CHECK(farthest_index(unit_weights(ModelSpace::euclidean(1), line_points({0, 2})), e({1})) == 0);
}

TEST_CASE("weighted barycenter on a line with three points") {
    const BarycenterResult r = barycenter(example_13_4());
    CHECK(coord(r.barycenter) == doctest::Approx(3.25).epsilon(1e-12));
    CHECK(r.baryradius == doctest::Approx(2.25).epsilon(1e-12));
    CHECK(r.certified);
    CHECK(r.active_indices == std::vector<std::size_t>{0, 2});
}

TEST_CASE("quadratic weights on ten thousand samples of the unit interval") {
    // Continuum optimum: 4 q^3 / 27 = 1 - q, solved by bisection.
    double lo = 0.0;
    double hi = 1.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (4.0 * mid * mid * mid / 27.0 < 1.0 - mid ? lo : hi) = mid;
    }
    CHECK(lo == doctest::Approx(0.8941074569749823).epsilon(1e-14));

    Rng rng(7);
    WeightedPointSet w{ModelSpace::euclidean(1), {}, {}};
    for (int i = 0; i < 10000; ++i) {
        const double x = rng.uniform();
        w.points.push_back(e({x}));
        w.weights.push_back(x * x);
    }
    const BarycenterResult r = barycenter(w);
    CHECK(std::abs(coord(r.barycenter) - 0.894) <= 5e-4);
    CHECK(std::abs(coord(r.barycenter) - lo) <= 1e-3);
}

TEST_CASE("two weighted points balance") {
    const BarycenterResult r = barycenter({ModelSpace::euclidean(1), line_points({0, 1}), {1, 2}});
    CHECK(coord(r.barycenter) == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(r.baryradius == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("star tree with a heavy leaf") {
    auto space = corpus_space(CorpusSpace::star_tree);
    const RTree& t = space->tree_structure()->tree();
    const BarycenterResult r = barycenter({space, {t.vertex_point(1), t.vertex_point(2), t.vertex_point(3)}, {2, 1, 1}});
    const TreePoint q = as_tree(r.barycenter);
    CHECK(q.edge == 0);
    CHECK(q.offset == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(r.baryradius == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(r.certified);
}

TEST_CASE("degenerate inputs") {
    auto line = ModelSpace::euclidean(1);
    const BarycenterResult single = barycenter({line, line_points({4, 7}), {0, 5}});
    CHECK(coord(single.barycenter) == 7.0);
    CHECK(single.baryradius == 0.0);

    const BarycenterResult merged = barycenter({line, line_points({0, 0, 2}), {1, 3, 3}});
    CHECK(coord(merged.barycenter) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(merged.baryradius == doctest::Approx(3.0).epsilon(1e-12));

    const BarycenterResult same = barycenter({line, line_points({2, 2}), {1, 4}});
    CHECK(same.baryradius == 0.0);

    try {
        barycenter({line, line_points({1, 2}), {0, 0}});
        FAIL("expected invalid input");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::invalid_input);
    }
    CHECK_THROWS_AS(barycenter({line, line_points({1, 2}), {1, -1}}), Error);
    CHECK_THROWS_AS(barycenter({line, line_points({1, 2}), {1}}), Error);
    CHECK_THROWS_AS(barycenter(example_13_4(), -1.0), Error);
}

TEST_CASE("positive curvature requires small diameter") {
    auto s2 = ModelSpace::sphere(2, 1.0);
    const std::vector<SpacePoint> pts = {s2->point(vec({1, 0, 0})), s2->point(vec({0, 1, 0}))};
    try {
        barycenter({s2, pts, {1, 2}});
        FAIL("expected a diameter error");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::diameter_bound);
    }
    // Constant weights relax the bound to D_k / 2.
    const std::vector<SpacePoint> wide = {s2->point(vec({1, 0, 0})), s2->point(vec({std::cos(1.2), std::sin(1.2), 0}))};
    CHECK_THROWS_AS(barycenter({s2, wide, {1, 2}}), Error);
    CHECK(circumcenter(s2, wide).baryradius == doctest::Approx(0.6).epsilon(1e-9));
}

TEST_CASE("circumcenters") {
    auto plane = ModelSpace::euclidean(2);
    const BarycenterResult two = circumcenter(plane, {e({0, 0}), e({3, 4})});
    CHECK(as_model(two.barycenter).coords().isApprox(vec({1.5, 2.0}), 1e-12));
    CHECK(two.baryradius == doctest::Approx(2.5).epsilon(1e-12));

    const BarycenterResult tri = circumcenter(plane, {e({0, 0}), e({1, 0}), e({0.5, std::sqrt(3.0) / 2.0})});
    CHECK((as_model(tri.barycenter).coords() - vec({0.5, std::sqrt(3.0) / 6.0})).norm() < 1e-9);
    CHECK(tri.baryradius == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-9));

    auto s2 = ModelSpace::sphere(2, 1.0);
    const BarycenterResult arc =
        circumcenter(s2, {s2->point(vec({1, 0, 0})), s2->point(vec({std::cos(0.3), std::sin(0.3), 0}))});
    CHECK(arc.baryradius == doctest::Approx(0.15).epsilon(1e-9));
    CHECK((as_model(arc.barycenter).coords() - vec({std::cos(0.15), std::sin(0.15), 0})).norm() < 1e-8);
}

TEST_CASE("power objective") {
    const BarycenterResult t1 = barycenter_pow(example_13_4(), 1.0);
    CHECK(coord(t1.barycenter) == coord(barycenter(example_13_4()).barycenter));

    const BarycenterResult sq = barycenter_pow(unit_weights(ModelSpace::euclidean(1), line_points({0, 1})), 2.0);
    CHECK(coord(sq.barycenter) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(sq.baryradius == doctest::Approx(0.25).epsilon(1e-12));

    const auto f = [](double x) {
        return std::max({1.0 * (x - 1) * (x - 1), 4.0 * (x - 3) * (x - 3), 3.0 * (x - 4) * (x - 4)});
    };
    const double xstar = ternary_min(f, 1.0, 4.0);
    const BarycenterResult r = barycenter_pow(example_13_4(), 2.0);
    CHECK(coord(r.barycenter) == doctest::Approx(xstar).epsilon(1e-8));
    CHECK(r.baryradius == doctest::Approx(f(xstar)).epsilon(1e-10));
    CHECK_THROWS_AS(barycenter_pow(example_13_4(), 0.0), Error);
}

TEST_CASE("oracle agrees on known examples") {
    const BarycenterResult g = oracle_grid(example_13_4());
    CHECK(coord(g.barycenter) == doctest::Approx(3.25).epsilon(1e-9));

    auto space = corpus_space(CorpusSpace::star_tree);
    const RTree& t = space->tree_structure()->tree();
    const BarycenterResult tree = oracle_grid({space, {t.vertex_point(1), t.vertex_point(2), t.vertex_point(3)}, {2, 1, 1}});
    CHECK(tree.baryradius == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(as_tree(tree.barycenter).offset == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

    try {
        oracle_grid(unit_weights(ModelSpace::euclidean(3), {e({0, 0, 0}), e({1, 0, 0})}));
        FAIL("expected unsupported");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::unsupported);
    }
}

TEST_CASE("solver never loses to the oracle or to random probes") {
    for (CorpusSpace kind : {CorpusSpace::e1, CorpusSpace::e2, CorpusSpace::s2, CorpusSpace::h2, CorpusSpace::binary_tree}) {
        CAPTURE(to_string(kind));
        Rng rng(31);
        for (const CorpusInstance& inst : make_corpus(kind, 5, 99)) {
            const BarycenterResult s = barycenter(inst.set);
            const BarycenterResult g = oracle_grid(inst.set);
            const double r = objective(inst.set, s.barycenter);
            CHECK(r <= objective(inst.set, g.barycenter) + 1e-9);
            CHECK(r == doctest::Approx(s.baryradius).epsilon(1e-12));
            for (int i = 0; i < 1000; ++i) {
                const SpacePoint x = inst.set.space->sample_near(s.barycenter, 0.5, rng);
                CHECK(r <= objective(inst.set, x) + 1e-12);
            }
        }
    }
}

TEST_CASE("baryradius is positive for two distinct weighted points") {
    for (CorpusSpace kind : corpus_spaces()) {
        for (const CorpusInstance& inst : make_corpus(kind, 5, 4)) {
            CHECK(barycenter(inst.set).baryradius > 0.0);
        }
    }
}

TEST_CASE("active indices refer to the caller's list") {
    auto line = ModelSpace::euclidean(1);
    const BarycenterResult r = barycenter({line, line_points({5, 1, 3, 4}), {0, 1, 4, 3}});
    CHECK(r.active_indices == std::vector<std::size_t>{1, 3});
}

TEST_CASE("spaces without a model structure use the generic descent") {
    auto space = std::make_shared<const OpaquePlane>();
    const WeightedPointSet w{space, {e({0, 0}), e({4, 0}), e({1, 3}), e({3, 2.5})}, {1, 2, 1.5, 0.7}};
    const WeightedPointSet model{ModelSpace::euclidean(2), w.points, w.weights};
    const BarycenterResult generic = barycenter(w);
    CHECK_FALSE(generic.certified);
    CHECK(generic.baryradius >= barycenter(model).baryradius - 1e-12);
    CHECK(generic.baryradius <= barycenter(model).baryradius + 1e-3);
}

TEST_CASE("a tight budget either certifies or reports the best iterate") {
    for (CorpusSpace kind : {CorpusSpace::star_tree, CorpusSpace::path_tree, CorpusSpace::binary_tree}) {
        for (const CorpusInstance& inst : make_corpus(kind, 20, 3)) {
            try {
                CHECK(barycenter(inst.set, kDefaultTol, 1).certified);
            } catch (const NonConvergence& err) {
                CHECK(err.code() == ErrorCode::non_convergence);
                CHECK_FALSE(err.best().certified);
                CHECK(err.best().baryradius == doctest::Approx(objective(inst.set, err.best().barycenter)));
            }
        }
    }
}

TEST_CASE("solver is deterministic") {
    const auto corpus = make_corpus(CorpusSpace::h2, 3, 5);
    for (const CorpusInstance& inst : corpus) {
        const BarycenterResult a = barycenter(inst.set);
        const BarycenterResult b = barycenter(inst.set);
        CHECK(as_model(a.barycenter) == as_model(b.barycenter));
        CHECK(a.baryradius == b.baryradius);
        CHECK(a.iterations == b.iterations);
    }
}
