#include "catbary/error.hpp"
#include "catbary/model_geometry.hpp"
#include "catbary/random.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace catbary;
using testing::vec;

namespace {

constexpr double pi = std::numbers::pi;
const CurvatureParam flat(0.0);
const CurvatureParam sphere(1.0);
const CurvatureParam hyper(-1.0);

ModelPoint random_point(const CurvatureParam& k, Rng& rng, double radius) {
    Eigen::VectorXd t = base_tangent(k, 2, 0) * rng.normal() + base_tangent(k, 2, 1) * rng.normal();
    t *= radius * rng.uniform() / t.norm();
    return exp_map(k, base_point(k, 2), t);
}

} // namespace

TEST_CASE("curvature parameter carries the model diameter") {
    CHECK(CurvatureParam(4.0).d_cap() == doctest::Approx(pi / 2.0).epsilon(1e-15));
    CHECK(std::isinf(CurvatureParam(0.0).d_cap()));
    CHECK(std::isinf(CurvatureParam(-2.0).d_cap()));
}

TEST_CASE("model points are validated") {
    CHECK_THROWS_AS(sphere_point(vec({1.0, 0.1, 0.0})), Error);
    CHECK_THROWS_AS(hyperboloid_point(vec({0.0, 0.0, -1.0})), Error);
    CHECK_NOTHROW(hyperboloid_lift(vec({0.3, -0.4})));
    CHECK(minkowski_dot(hyperboloid_lift(vec({0.3, -0.4})).coords(), hyperboloid_lift(vec({0.3, -0.4})).coords()) ==
          doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("distances in the three model spaces") {
    CHECK(model_distance(flat, euclidean_point(vec({0, 0})), euclidean_point(vec({3, 4}))) == doctest::Approx(5.0));
    CHECK(model_distance(sphere, sphere_point(vec({1, 0, 0})), sphere_point(vec({0, 1, 0}))) ==
          doctest::Approx(pi / 2.0).epsilon(1e-15));
    // arccosh by its logarithmic form applied to the series value of cosh 1.
    const double c = testing::cosh_series(1.0);
    const double s = std::sqrt(c * c - 1.0);
    const double expected = std::log(c + s);
    CHECK(expected == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(model_distance(hyper, hyperboloid_point(vec({0, 0, 1})), hyperboloid_point(vec({s, 0, c}))) ==
          doctest::Approx(expected).epsilon(1e-13));
    CHECK_THROWS_AS(model_distance(flat, euclidean_point(vec({0, 0})), euclidean_point(vec({0, 0, 0}))), Error);
}

TEST_CASE("distances scale with curvature") {
    const CurvatureParam k4(4.0);
    CHECK(model_distance(k4, sphere_point(vec({1, 0, 0})), sphere_point(vec({0, 1, 0}))) ==
          doctest::Approx(pi / 4.0).epsilon(1e-15));
    const CurvatureParam km4(-4.0);
    const double c = std::cosh(1.0);
    CHECK(model_distance(km4, hyperboloid_point(vec({0, 0, 1})), hyperboloid_point(vec({std::sinh(1.0), 0, c}))) ==
          doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("geodesic points") {
    const ModelPoint mid = geodesic_point(flat, euclidean_point(vec({0, 0})), euclidean_point(vec({2, 0})), 0.5);
    CHECK((mid.coords() - vec({1, 0})).norm() < 1e-15);

    const ModelPoint y = sphere_point(vec({std::cos(0.3), std::sin(0.3), 0}));
    const ModelPoint m = geodesic_point(sphere, sphere_point(vec({1, 0, 0})), y, 0.5);
    CHECK((m.coords() - vec({std::cos(0.15), std::sin(0.15), 0})).norm() < 1e-14);

    Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        const ModelPoint a = random_point(hyper, rng, 2.0);
        const ModelPoint b = random_point(hyper, rng, 2.0);
        const ModelPoint q = geodesic_point(hyper, a, b, 0.25);
        CHECK(model_distance(hyper, a, q) == doctest::Approx(0.25 * model_distance(hyper, a, b)).epsilon(1e-9));
    }

    CHECK_THROWS_AS(geodesic_point(sphere, sphere_point(vec({1, 0, 0})), sphere_point(vec({-1, 0, 0})), 0.5), Error);
}

TEST_CASE("law of cosines") {
    CHECK(law_of_cosines(flat, 3.0, 4.0, pi / 2.0) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK(law_of_cosines(sphere, pi / 4.0, pi / 4.0, 0.0) == doctest::Approx(0.0));
    // arccosh(cosh^2 1) from the series and the log form.
    const double c2 = testing::cosh_series(1.0) * testing::cosh_series(1.0);
    const double oracle = std::log(c2 + std::sqrt(c2 * c2 - 1.0));
    CHECK(oracle == doctest::Approx(1.513374006596504).epsilon(1e-14));
    CHECK(law_of_cosines(hyper, 1.0, 1.0, pi / 2.0) == doctest::Approx(oracle).epsilon(1e-13));
    CHECK_THROWS_AS(law_of_cosines(flat, 1.0, 1.0, 4.0), Error);
    CHECK_THROWS_AS(law_of_cosines(flat, 1.0, 1.0, -0.1), Error);
}

TEST_CASE("small curvature approaches the flat law of cosines") {
    Rng rng(11);
    for (int i = 0; i < 200; ++i) {
        const double b = rng.uniform(0.0, 1.0);
        const double c = rng.uniform(0.0, 1.0);
        const double alpha = rng.uniform(0.0, pi);
        const double flat_side = law_of_cosines(flat, b, c, alpha);
        CHECK(std::abs(law_of_cosines(CurvatureParam(1e-4), b, c, alpha) - flat_side) <= 1e-3);
        CHECK(std::abs(law_of_cosines(CurvatureParam(-1e-4), b, c, alpha) - flat_side) <= 1e-3);
    }
}

TEST_CASE("comparison angle inverts the law of cosines") {
    Rng rng(5);
    for (const CurvatureParam& k : {flat, sphere, hyper}) {
        for (int i = 0; i < 100; ++i) {
            const double b = rng.uniform(0.05, 0.7);
            const double c = rng.uniform(0.05, 0.7);
            const double alpha = rng.uniform(0.01, pi - 0.01);
            const double a = law_of_cosines(k, b, c, alpha);
            CHECK(comparison_angle(k, a, b, c) == doctest::Approx(alpha).epsilon(1e-7));
        }
    }
}

TEST_CASE("comparison triangles") {
    const ComparisonTriangle t = comparison_triangle(flat, 3.0, 4.0, 5.0);
    CHECK((t.vertices[0].coords() - vec({0, 0})).norm() < 1e-14);
    CHECK((t.vertices[1].coords() - vec({5, 0})).norm() < 1e-14);
    CHECK((t.vertices[2].coords() - vec({16.0 / 5.0, 12.0 / 5.0})).norm() < 1e-14);

    const ComparisonTriangle eq = comparison_triangle(flat, 1.0, 1.0, 1.0);
    for (int i = 0; i < 3; ++i) {
        CHECK(model_distance(flat, eq.vertices[i], eq.vertices[(i + 1) % 3]) == doctest::Approx(1.0).epsilon(1e-14));
    }
    const ComparisonTriangle sph = comparison_triangle(sphere, 0.2, 0.2, 0.2);
    for (int i = 0; i < 3; ++i) {
        CHECK(model_distance(sphere, sph.vertices[i], sph.vertices[(i + 1) % 3]) == doctest::Approx(0.2).epsilon(1e-9));
    }

    CHECK_THROWS_AS(comparison_triangle(flat, 1.0, 1.0, 3.0), Error);
    CHECK_THROWS_AS(comparison_triangle(sphere, 2.5, 2.5, 2.5), Error);
    try {
        comparison_triangle(flat, 1.0, 1.0, 3.0);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::infeasible_triangle);
    }
}

TEST_CASE("comparison triangles reproduce their side lengths") {
    Rng rng(8);
    for (const CurvatureParam& k : {flat, sphere, hyper, CurvatureParam(2.5), CurvatureParam(-0.3)}) {
        for (int i = 0; i < 100; ++i) {
            const double b = rng.uniform(0.01, 0.5);
            const double c = rng.uniform(0.01, 0.5);
            const double a = law_of_cosines(k, b, c, rng.uniform(0.0, pi));
            const ComparisonTriangle t = comparison_triangle(k, a, b, c);
            CHECK(model_distance(k, t.vertices[1], t.vertices[2]) == doctest::Approx(a).epsilon(1e-9).scale(1.0));
            CHECK(model_distance(k, t.vertices[0], t.vertices[2]) == doctest::Approx(b).epsilon(1e-9).scale(1.0));
            CHECK(model_distance(k, t.vertices[0], t.vertices[1]) == doctest::Approx(c).epsilon(1e-9).scale(1.0));
        }
    }
}

TEST_CASE("comparison points") {
    const ComparisonTriangle t = comparison_triangle(flat, 3.0, 4.0, 5.0);
    CHECK(comparison_point(t, TriangleSide::xy, 0.0) == t.vertices[0]);
    CHECK((comparison_point(t, TriangleSide::xy, 5.0).coords() - t.vertices[1].coords()).norm() < 1e-14);
    CHECK((comparison_point(t, TriangleSide::xy, 2.5).coords() - vec({2.5, 0})).norm() < 1e-14);
    CHECK_THROWS_AS(comparison_point(t, TriangleSide::xy, 5.5), Error);
    CHECK_THROWS_AS(comparison_point(t, TriangleSide::yz, -0.1), Error);
}

TEST_CASE("metric axioms and geodesic isometry on sampled points") {
    Rng rng(21);
    for (const CurvatureParam& k : {flat, sphere, hyper}) {
        const double radius = k.positive() ? 1.0 : 3.0;
        for (int i = 0; i < 1000; ++i) {
            const ModelPoint x = random_point(k, rng, radius);
            const ModelPoint y = random_point(k, rng, radius);
            const ModelPoint z = random_point(k, rng, radius);
            const double dxy = model_distance(k, x, y);
            CHECK(dxy == model_distance(k, y, x));
            CHECK(model_distance(k, x, z) <= dxy + model_distance(k, y, z) + 1e-9);
            const double t1 = rng.uniform();
            const double t2 = rng.uniform();
            const double along = model_distance(k, geodesic_point(k, x, y, t1), geodesic_point(k, x, y, t2));
            CHECK(std::abs(along - std::abs(t1 - t2) * dxy) <= 1e-9);
        }
    }
}

TEST_CASE("model triangles meet their own comparison distances") {
    Rng rng(4);
    for (const CurvatureParam& k : {flat, sphere, hyper}) {
        for (int i = 0; i < 300; ++i) {
            const ModelPoint x = random_point(k, rng, 1.0);
            const ModelPoint y = random_point(k, rng, 1.0);
            const ModelPoint z = random_point(k, rng, 1.0);
            const double a = model_distance(k, y, z);
            const double b = model_distance(k, x, z);
            const double c = model_distance(k, x, y);
            if (a < 1e-3 || b < 1e-3 || c < 1e-3 || a + b <= c + 1e-6 || a + c <= b + 1e-6 || b + c <= a + 1e-6) continue;
            const ComparisonTriangle t = comparison_triangle(k, a, b, c);
            const double s = rng.uniform();
            const double r = rng.uniform();
            const double actual = model_distance(k, geodesic_point(k, x, y, s), geodesic_point(k, x, z, r));
            const double model = model_distance(k, comparison_point(t, TriangleSide::xy, s * c),
                                                comparison_point(t, TriangleSide::xz, r * b));
            CHECK(std::abs(actual - model) <= 1e-9);
        }
    }
}

TEST_CASE("points of the r-ball are closer to the inner point of a radial segment") {
    Rng rng(13);
    for (const CurvatureParam& k : {flat, sphere, hyper}) {
        const ModelPoint x = base_point(k, 2);
        for (int i = 0; i < 500; ++i) {
            const double cap = k.positive() ? 0.5 * k.d_cap() : 3.0;
            const double s = rng.uniform(0.05, cap);
            const double r = s * rng.uniform(0.05, 0.95);
            const Eigen::VectorXd dir = base_tangent(k, 2, 0) * std::cos(rng.uniform(0, 2 * pi)) +
                                        base_tangent(k, 2, 1) * std::sin(rng.uniform(0, 2 * pi));
            const Eigen::VectorXd unit = dir / dir.norm();
            const ModelPoint y = exp_map(k, x, r * unit);
            const ModelPoint z = exp_map(k, x, s * unit);
            const Eigen::VectorXd wdir = base_tangent(k, 2, 0) * rng.normal() + base_tangent(k, 2, 1) * rng.normal();
            const ModelPoint w = exp_map(k, x, wdir * (r * rng.uniform() / wdir.norm()));
            CHECK(model_distance(k, y, w) < model_distance(k, z, w));
        }
    }
}

TEST_CASE("m_k matches independent optimizer values") {
    struct Case {
        double k, r, s, value;
    };
    // Nelder-Mead minima of d(w, z) - d(w, pi(z)) over w in the r-ball and z on the s-sphere.
    const Case cases[] = {
        {0.0, 1.0, 2.0, 0.7071067811865474},  {0.0, 0.1, 10.0, 9.850375627355536},
        {1.0, 0.3, 0.9, 0.4832804471583642},  {-1.0, 0.1, 0.3, 0.1635242659298527},
        {-1.0, 0.3, 0.9, 0.49560021319073366}, {-1.0, 1.0, 2.0, 0.7792856564927297},
        {0.0, 0.1, 0.3, 0.16329931618554516}, {0.0, 0.3, 0.9, 0.4898979485566356},
        {1.0, 0.1, 0.3, 0.16307062386935314},
    };
    for (const Case& c : cases) {
        CAPTURE(c.k);
        CAPTURE(c.r);
        CAPTURE(c.s);
        const double m = m_k_constant(CurvatureParam(c.k), c.r, c.s);
        CHECK(m > 0.0);
        CHECK(m == doctest::Approx(c.value).epsilon(1e-4));
    }
    CHECK_THROWS_AS(m_k_constant(flat, 1.0, 1.0), Error);
    CHECK_THROWS_AS(m_k_constant(sphere, 0.5, 1.6), Error);
}
