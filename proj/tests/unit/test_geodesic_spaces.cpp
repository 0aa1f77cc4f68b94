#include "catbary/error.hpp"
#include "catbary/geodesic_spaces.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

using namespace catbary;
using testing::vec;

namespace {

RTree star_tree() { return RTree(4, {{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}}, {"c", "A", "B", "C"}); }

// Vertex distances by Dijkstra over the edge list.
std::vector<double> dijkstra(const RTree& t, std::size_t source) {
    std::vector<double> d(t.vertex_count(), std::numeric_limits<double>::infinity());
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> q;
    d[source] = 0.0;
    q.push({0.0, source});
    while (!q.empty()) {
        const auto [dist, v] = q.top();
        q.pop();
        if (dist > d[v]) continue;
        for (const auto& e : t.edges()) {
            for (auto [a, b] : {std::pair{e.u, e.v}, std::pair{e.v, e.u}}) {
                if (a == v && dist + e.length < d[b]) {
                    d[b] = dist + e.length;
                    q.push({d[b], b});
                }
            }
        }
    }
    return d;
}

// Point-to-point distance from the endpoint distances of both edges.
double oracle_distance(const RTree& t, const TreePoint& p, const TreePoint& q) {
    const auto& ep = t.edge(p.edge);
    const auto& eq = t.edge(q.edge);
    if (p.edge == q.edge) return std::abs(p.offset - q.offset);
    double best = std::numeric_limits<double>::infinity();
    for (auto [vp, dp] : {std::pair{ep.u, p.offset}, std::pair{ep.v, ep.length - p.offset}}) {
        const auto d = dijkstra(t, vp);
        best = std::min({best, dp + d[eq.u] + q.offset, dp + d[eq.v] + eq.length - q.offset});
    }
    return best;
}

RTree random_tree(Rng& rng, std::size_t n) {
    std::vector<RTree::Edge> edges;
    for (std::size_t v = 1; v < n; ++v) edges.push_back({rng.index(v), v, rng.uniform(0.1, 2.0)});
    return RTree(n, edges);
}

TreePoint random_tree_point(const RTree& t, Rng& rng) {
    const std::size_t e = rng.index(t.edges().size());
    return t.point(e, rng.uniform(0.0, t.edge(e).length));
}

} // namespace

TEST_CASE("tree construction is validated") {
    CHECK_THROWS_AS(RTree(3, {{0, 1, 1.0}}), Error);                 // disconnected
    CHECK_THROWS_AS(RTree(3, {{0, 1, 1.0}, {1, 2, 0.0}}), Error);    // zero length
    CHECK_THROWS_AS(RTree(3, {{0, 1, 1.0}, {1, 0, 1.0}}), Error);    // cycle
    CHECK_THROWS_AS(RTree(2, {{0, 2, 1.0}}), Error);                 // bad vertex
    CHECK_NOTHROW(star_tree());
}

TEST_CASE("tree distances") {
    const RTree t = star_tree();
    CHECK(tree_distance(t, t.vertex_point(1), t.vertex_point(2)) == doctest::Approx(2.0));
    const TreePoint p = t.point(1, 0.4);
    CHECK(tree_distance(t, p, p) == 0.0);

    const RTree path(3, {{0, 1, 1.0}, {1, 2, 2.0}}, {"a", "b", "c"});
    CHECK(tree_distance(path, path.point(0, 0.5), path.point(1, 1.5)) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(oracle_distance(path, path.point(0, 0.5), path.point(1, 1.5)) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK_THROWS_AS(tree_distance(path, TreePoint{5, 0.0}, path.point(0, 0.0)), Error);
    CHECK_THROWS_AS(path.point(0, 1.5), Error);
}

TEST_CASE("tree distances match shortest paths on random trees") {
    Rng rng(9);
    for (int trial = 0; trial < 20; ++trial) {
        const RTree t = random_tree(rng, 2 + rng.index(12));
        for (int i = 0; i < 20; ++i) {
            const TreePoint p = random_tree_point(t, rng);
            const TreePoint q = random_tree_point(t, rng);
            CHECK(tree_distance(t, p, q) == doctest::Approx(oracle_distance(t, p, q)).epsilon(1e-12));
        }
    }
}

TEST_CASE("vertex points are canonical") {
    const RTree t = star_tree();
    // Leaf A as the far end of edge 0 and the centre as the near end of edge 2.
    CHECK(t.point(0, 1.0) == t.vertex_point(1));
    CHECK(t.point(2, 0.0) == t.vertex_point(0));
    CHECK(t.point(2, 0.0) == t.point(1, 0.0));
    CHECK(t.vertex_index("B") == 2);
}

TEST_CASE("tree geodesics") {
    const RTree t = star_tree();
    const TreePoint a = t.vertex_point(1);
    const TreePoint b = t.vertex_point(2);
    CHECK(tree_geodesic_point(t, a, b, 0.0) == a);
    CHECK(tree_geodesic_point(t, a, b, 1.0) == b);
    CHECK(tree_geodesic_point(t, a, b, 0.5) == t.vertex_point(0));

    Rng rng(1);
    for (int trial = 0; trial < 10; ++trial) {
        const RTree r = random_tree(rng, 2 + rng.index(10));
        for (int i = 0; i < 30; ++i) {
            const TreePoint p = random_tree_point(r, rng);
            const TreePoint q = random_tree_point(r, rng);
            const double s = rng.uniform();
            const TreePoint x = tree_geodesic_point(r, p, q, s);
            const double d = tree_distance(r, p, q);
            CHECK(tree_distance(r, p, x) == doctest::Approx(s * d).epsilon(1e-12).scale(1.0));
            CHECK(tree_distance(r, x, q) == doctest::Approx((1.0 - s) * d).epsilon(1e-12).scale(1.0));
        }
    }
}

TEST_CASE("trees satisfy the four-point condition") {
    Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        const RTree t = random_tree(rng, 3 + rng.index(10));
        for (int i = 0; i < 50; ++i) {
            std::array<TreePoint, 4> p;
            for (auto& x : p) x = random_tree_point(t, rng);
            std::array<double, 3> sums = {
                tree_distance(t, p[0], p[1]) + tree_distance(t, p[2], p[3]),
                tree_distance(t, p[0], p[2]) + tree_distance(t, p[1], p[3]),
                tree_distance(t, p[0], p[3]) + tree_distance(t, p[1], p[2]),
            };
            std::sort(sums.begin(), sums.end());
            CHECK(sums[2] - sums[1] <= 1e-9);
        }
    }
}

TEST_CASE("every space passes the sampled comparison test") {
    Rng rng(23);
    const std::vector<SpacePtr> spaces = {
        ModelSpace::euclidean(2), ModelSpace::sphere(2, 1.0), ModelSpace::hyperbolic(2, -1.0),
        ModelSpace::sphere(3, 4.0), std::make_shared<const TreeSpace>(star_tree()),
        std::make_shared<const TreeSpace>(random_tree(rng, 12))};
    for (const SpacePtr& space : spaces) {
        CAPTURE(space->name());
        std::vector<SpacePoint> pts;
        SpacePoint center = space->tree_structure() ? SpacePoint(space->tree_structure()->tree().vertex_point(0))
                                                    : SpacePoint(base_point(space->curvature(),
                                                                            space->model_structure()->dim()));
        const double radius = space->curvature().positive() ? 0.3 * space->curvature().d_cap() : 3.0;
        for (int i = 0; i < 40; ++i) pts.push_back(space->sample_near(center, radius, rng));
        CHECK(sampled_cat_check(*space, pts, rng, 2000) <= 1e-9);
    }
}

TEST_CASE("convex subsets") {
    auto plane = ModelSpace::euclidean(2);
    auto disk = convex_subset_space(
        plane, [](const SpacePoint& p) { return as_model(p).coords().norm() <= 1.0; },
        [](const SpacePoint& p) -> SpacePoint {
            const Eigen::VectorXd& c = as_model(p).coords();
            return c.norm() <= 1.0 ? p : SpacePoint(euclidean_point(c / c.norm()));
        });
    const SpacePoint a = testing::e({-0.5, 0.2});
    const SpacePoint b = testing::e({0.6, -0.3});
    CHECK(disk->distance(a, b) == doctest::Approx(plane->distance(a, b)));
    CHECK(as_model(disk->geodesic_point(a, b, 0.5)).coords().isApprox(vec({0.05, -0.05})));
    CHECK_THROWS_AS(disk->validate(testing::e({2.0, 0.0})), Error);

    auto half = convex_subset_space(
        plane, [](const SpacePoint& p) { return as_model(p)[0] >= 0.0; }, nullptr);
    CHECK_NOTHROW(half->geodesic_point(testing::e({0.0, 5.0}), testing::e({3.0, -1.0}), 0.3));

    // L-shape: the segment between the arm tips cuts the missing corner.
    auto ell = convex_subset_space(
        plane,
        [](const SpacePoint& p) {
            const auto& c = as_model(p).coords();
            const bool in_box = c[0] >= 0.0 && c[0] <= 2.0 && c[1] >= 0.0 && c[1] <= 2.0;
            return in_box && (c[0] <= 1.0 || c[1] <= 1.0);
        },
        nullptr);
    try {
        ell->geodesic_point(testing::e({0.5, 2.0}), testing::e({2.0, 0.5}), 0.5);
        FAIL("expected a convexity violation");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::convexity_violation);
    }
}

TEST_CASE("model spaces validate their points") {
    auto s2 = ModelSpace::sphere(2, 1.0);
    CHECK_THROWS_AS(s2->validate(testing::e({1.0, 0.0})), Error);
    CHECK_THROWS_AS(s2->point(vec({1.0, 0.0, 0.0, 0.0})), Error);
    CHECK_NOTHROW(s2->point(vec({0.0, 0.0, 1.0})));
    auto tree = std::make_shared<const TreeSpace>(star_tree());
    CHECK_THROWS_AS(tree->validate(testing::e({1.0})), Error);
    CHECK_THROWS_AS(ModelSpace::sphere(2, -1.0), Error);
    CHECK_THROWS_AS(ModelSpace::hyperbolic(2, 1.0), Error);
}
