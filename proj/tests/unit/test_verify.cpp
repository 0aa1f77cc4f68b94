#include "catbary/error.hpp"
#include "catbary/verify.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <random>

using namespace catbary;
using testing::vec;

TEST_CASE("hull distance") {
    const std::vector<Eigen::VectorXd> tri = {vec({0, 0}), vec({1, 0}), vec({0, 1})};
    CHECK(hull_distance(tri, vec({0.2, 0.2})) < 1e-12);
    CHECK(hull_distance(tri, vec({1, 1})) == doctest::Approx(std::sqrt(0.5)).epsilon(1e-12));
    CHECK(hull_distance(tri, vec({-1, -1})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(hull_distance(tri, vec({2, -1})) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    CHECK(hull_distance({vec({3, 4})}, vec({0, 0})) == doctest::Approx(5.0));
}

TEST_CASE("hull distance agrees with a projected-gradient oracle") {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        std::vector<Eigen::VectorXd> pts;
        for (int i = 0; i < 6; ++i) pts.push_back(vec({unit(gen), unit(gen), unit(gen)}));
        const Eigen::VectorXd q = vec({2 * unit(gen), 2 * unit(gen), 2 * unit(gen)});
        // Frank-Wolfe over the simplex of convex weights.
        Eigen::VectorXd x = pts[0];
        for (int k = 0; k < 20000; ++k) {
            std::size_t best = 0;
            for (std::size_t i = 1; i < pts.size(); ++i) {
                if ((x - q).dot(pts[i]) < (x - q).dot(pts[best])) best = i;
            }
            x += 2.0 / (k + 2.0) * (pts[best] - x);
        }
        CHECK(hull_distance(pts, q) <= (x - q).norm() + 1e-12);
        CHECK(hull_distance(pts, q) >= (x - q).norm() - 1e-3);
    }
}

TEST_CASE("suites are deterministic in the seed") {
    const auto a = run_suite("scaling", {.seed = 4, .count = 2});
    const auto b = run_suite("scaling", {.seed = 4, .count = 2});
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].instance == b[i].instance);
        CHECK(a[i].measured == b[i].measured);
    }
    CHECK(summarize(a).all_pass());
}

TEST_CASE("every suite is registered and runs") {
    CHECK(verify_suites().size() == 12);
    for (const std::string& name : {"jung", "zero-weight", "containment", "equivariance", "fixed-point", "mk"}) {
        CAPTURE(name);
        const auto records = run_suite(name, {.seed = 2, .count = 2});
        CHECK_FALSE(records.empty());
        CHECK(summarize(records).all_pass());
    }
}

TEST_CASE("unknown suites are rejected") {
    try {
        run_suite("nonsense");
        FAIL("expected invalid input");
    } catch (const Error& err) {
        CHECK(err.code() == ErrorCode::invalid_input);
    }
}

TEST_CASE("records serialize to JSON") {
    CheckRecord rec{.suite = "s", .instance = "i", .bound = 1.0, .measured = 0.5, .pass = true};
    rec.with("delta", 0.25);
    const auto j = to_json(rec);
    CHECK(j["suite"] == "s");
    CHECK(j["pass"] == true);
    CHECK(j["delta"] == 0.25);
}
