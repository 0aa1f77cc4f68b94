#include "catbary/corpus.hpp"
#include "catbary/error.hpp"
#include "catbary/gh_limits.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>

using namespace catbary;
using testing::coord;
using testing::e;
using testing::line_points;

TEST_CASE("Hausdorff distance") {
    auto plane = ModelSpace::euclidean(2);
    const std::vector<SpacePoint> square = {e({0, 0}), e({1, 0}), e({0, 1}), e({1, 1})};
    std::vector<SpacePoint> with_center = square;
    with_center.push_back(e({0.5, 0.5}));
    CHECK(hausdorff_distance(*plane, square, with_center) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-15));
    CHECK(hausdorff_distance(*plane, square, square) == 0.0);

    auto line = ModelSpace::euclidean(1);
    CHECK(hausdorff_distance(*line, line_points({0, 1}), line_points({0, 4})) == 3.0);
    CHECK(hausdorff_distance(*line, line_points({0}), line_points({-1, 2})) == 2.0);
}

TEST_CASE("Hausdorff distance satisfies the triangle inequality") {
    auto plane = ModelSpace::euclidean(2);
    Rng rng(3);
    for (int t = 0; t < 100; ++t) {
        std::vector<SpacePoint> sets[3];
        for (auto& s : sets) {
            for (const auto& p : random_cloud(2, 1 + t % 7, rng)) s.push_back(euclidean_point(p));
        }
        CHECK(hausdorff_distance(*plane, sets[0], sets[2]) <=
              hausdorff_distance(*plane, sets[0], sets[1]) + hausdorff_distance(*plane, sets[1], sets[2]) + 1e-12);
    }
}

TEST_CASE("resolutions must be finer than delta") {
    auto line = ModelSpace::euclidean(1);
    CHECK_NOTHROW(validate_resolution({line, line_points({0, 1}), line_points({0.1, 0.9}), 0.2}));
    CHECK_THROWS_AS(validate_resolution({line, line_points({0, 1}), line_points({0.1, 0.9}), 0.1}), Error);
}

TEST_CASE("grid sequence converges to the continuum barycenter") {
    const ConvergingSequence seq = interval_grid_sequence([](double x) { return x * x; }, 2, 10, 12);
    CHECK_NOTHROW(validate_sequence(seq));
    const LimitReport rep = barycenter_limit(seq);
    CHECK(rep.all_pass());
    REQUIRE(rep.limit_barycenter.has_value());
    CHECK(std::abs(coord(*rep.limit_barycenter) - 0.8941074569749823) < 1e-3);
    REQUIRE(rep.distances.size() == 9);
    CHECK(rep.distances.back() < rep.distances.front());
    CHECK(rep.distances.back() < 1e-3);
    CHECK(rep.ladder.size() == 3);
    for (std::size_t i = 0; i + 1 < rep.hausdorff.size(); ++i) CHECK(rep.hausdorff[i + 1] < rep.hausdorff[i]);
}

TEST_CASE("sequence validation") {
    ConvergingSequence seq = interval_grid_sequence([](double) { return 1.0; }, 1, 4, 6);
    std::swap(seq.stages[0].delta, seq.stages[1].delta);
    CHECK_THROWS_AS(validate_sequence(seq), Error);

    ConvergingSequence tight = interval_grid_sequence([](double) { return 1.0; }, 1, 4, 6);
    tight.weight_bound = 0.5;
    CHECK_THROWS_AS(validate_sequence(tight), Error);
}

TEST_CASE("weight convergence detects discontinuous weights") {
    const ConvergingSequence smooth = interval_grid_sequence([](double x) { return x * x; }, 4, 10, 12);
    CHECK(weight_convergence_check(smooth, 0.5, 0).pass);
    const ConvergingSequence step = interval_grid_sequence([](double x) { return x < 0.5 ? 1.0 : 2.0; }, 4, 10, 12);
    CHECK_FALSE(weight_convergence_check(step, 0.5, 0).pass);
}

TEST_CASE("jittered clouds converge") {
    Rng rng(9);
    const auto cloud = random_cloud(2, 12, rng);
    std::vector<double> weights;
    for (std::size_t i = 0; i < cloud.size(); ++i) weights.push_back(0.5 + rng.uniform());
    const ConvergingSequence seq = jitter_sequence(cloud, weights, 16, 4);
    CHECK_NOTHROW(validate_sequence(seq));
    const LimitReport rep = barycenter_limit(seq);
    CHECK(rep.all_pass());
    CHECK(rep.distances.back() < 1e-3);
}

TEST_CASE("positive curvature limits are unsupported") {
    auto s2 = ModelSpace::sphere(2);
    ConvergingSequence seq;
    seq.ambient = s2;
    seq.limit_points = {s2->point(testing::vec({0, 0, 1}))};
    seq.limit_weights = {1};
    try {
        barycenter_limit(seq);
        FAIL("expected unsupported");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::unsupported);
    }
}

TEST_CASE("weighted distances agree across a resolution") {
    auto line = ModelSpace::euclidean(1);
    const FiniteResolution r{line, line_points({0, 0.5, 1}), line_points({0.02, 0.49, 1.01}), 0.05};
    const std::vector<double> f = {1.0, 2.0, 1.5};
    const std::vector<double> g = {1.01, 1.98, 1.5};
    const double eps = resolution_epsilon(r, f, g);
    CHECK(eps > 0.02);
    CHECK(eps < 0.021);
    const CheckRecord rec = resolution_bound_check(r, f, g, eps);
    CHECK(rec.pass);
    CHECK(rec.measured <= rec.bound);
}
