#include "catbary/error.hpp"
#include "catbary/retraction.hpp"
#include "helpers.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace catbary;
using testing::vec;

namespace {

const BallCover& disk_cover() {
    static const BallCover cover =
        build_cover(disk_target(vec({0, 0}), 1.0), {vec({-2, -2}), vec({2, 2})}, 1e-2, 101);
    return cover;
}

ErrorCode code_of(auto&& f) {
    try {
        f();
    } catch (const Error& err) {
        return err.code();
    }
    FAIL("expected an error");
    return ErrorCode::invalid_input;
}

} // namespace

TEST_CASE("targets project onto themselves") {
    const ConvexTarget disk = disk_target(vec({1, 1}), 2.0);
    CHECK(disk.contains(vec({2, 2})));
    CHECK_FALSE(disk.contains(vec({4, 1})));
    CHECK((disk.project(vec({4, 1})) - vec({3, 1})).norm() < 1e-15);
    CHECK(disk.distance(vec({1, 5})) == doctest::Approx(2.0));

    const ConvexTarget half = half_space_target(vec({0, 2}), 0.0);
    CHECK(half.contains(vec({5, 0})));
    CHECK((half.project(vec({3, -2})) - vec({3, 0})).norm() < 1e-15);

    const ConvexTarget box = box_target(vec({-0.5, -0.5}), vec({0.5, 0.5}));
    CHECK((box.project(vec({1, 2})) - vec({0.5, 0.5})).norm() < 1e-15);
    CHECK(box.distance(vec({1.5, 0})) == doctest::Approx(1.0));

    CHECK(code_of([] { disk_target(vec({0, 0}), 0.0); }) == ErrorCode::invalid_input);
    CHECK(code_of([] { half_space_target(vec({0, 0}), 1.0); }) == ErrorCode::invalid_input);
}

TEST_CASE("cover members are Whitney balls") {
    const BallCover& cover = disk_cover();
    REQUIRE(cover.size() > 0);
    CHECK(cover.collar_width() <= cover.packing());
    for (std::size_t i = 0; i < cover.size(); i += 17) {
        const Eigen::VectorXd v = cover.center(i);
        const double d = cover.target().distance(v);
        CHECK(cover.radius(i) == doctest::Approx(d / 2.0).epsilon(1e-12));
        CHECK((cover.anchor(i) - cover.target().project(v)).norm() < 1e-12);
    }
}

TEST_CASE("points away from X are covered and weights form a partition of unity") {
    const BallCover& cover = disk_cover();
    Rng rng(4);
    std::size_t tested = 0;
    while (tested < 500) {
        const Eigen::VectorXd y = vec({4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0});
        if (cover.target().distance(y) < cover.collar_width()) continue;
        ++tested;
        const auto members = cover.containing(y);
        REQUIRE_FALSE(members.empty());
        for (std::size_t m : members) CHECK((y - cover.center(m)).norm() < cover.radius(m));
        double total = 0.0;
        for (const auto& [id, u] : partition_of_unity(cover, y)) {
            CHECK(u > 0.0);
            total += u;
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    }
    CHECK(code_of([&] { partition_of_unity(cover, vec({0.2, 0.2})); }) == ErrorCode::not_applicable);
}

TEST_CASE("retraction fixes X and maps into X") {
    const BallCover& cover = disk_cover();
    const Retracted inside = retract(cover, vec({0.3, -0.4}));
    CHECK(inside.mode == RetractMode::identity);
    CHECK(inside.point == vec({0.3, -0.4}));

    const Retracted r = retract(cover, vec({1.5, 0}));
    CHECK(r.mode == RetractMode::barycenter);
    CHECK(r.point.norm() <= 1.0 + 1e-9);
    CHECK(std::abs(r.point[1]) < 1e-6);
    CHECK(r.point[0] > 0.9);

    const Retracted collar = retract(cover, vec({1.0 + 1e-5, 0}));
    CHECK(collar.point.norm() <= 1.0 + 1e-9);

    CHECK(retraction_identity_check(cover, 21).pass);
    CHECK(image_containment_check(cover, 41).pass);
    CHECK(to_string(RetractMode::collar_projection) == "collar-projection");
}

TEST_CASE("retraction is uniformly continuous at the boundary") {
    const BallCover& cover = disk_cover();
    const auto boundary = circle_samples(vec({0, 0}), 1.0, 40);
    REQUIRE(boundary.size() == 40);
    for (const auto& x : boundary) CHECK(x.norm() == doctest::Approx(1.0).epsilon(1e-15));
    const ProbeReport probe = continuity_probe(cover, boundary, 0.1, 3);
    CHECK(probe.modulus.pass);
    CHECK(probe.modulus.measured < 0.1);
    CHECK(probe.anchor_distance.pass);
    CHECK(probe.anchor_distance.bound == 6.0);
    CHECK(local_continuity_check(cover, 5e-2, 40).pass);
}

TEST_CASE("half-plane and square targets") {
    const BallCover half =
        build_cover(half_space_target(vec({0, 1}), 0.0), {vec({-1, -1}), vec({1, 1})}, 1e-2, 51);
    const Retracted r = retract(half, vec({0.25, -0.5}));
    CHECK(r.point[1] >= -1e-9);
    CHECK(image_containment_check(half, 31).pass);

    const BallCover square =
        build_cover(box_target(vec({-0.5, -0.5}), vec({0.5, 0.5})), {vec({-1.5, -1.5}), vec({1.5, 1.5})}, 1e-2, 51);
    const auto corner = continuity_probe(square, {vec({0.5, 0.5}), vec({-0.5, 0.5}), vec({0, -0.5})}, 0.1, 5);
    CHECK(corner.modulus.pass);
    CHECK(corner.anchor_distance.pass);
}

TEST_CASE("a window inside X needs no members") {
    const BallCover cover = build_cover(disk_target(vec({0, 0}), 10.0), {vec({-1, -1}), vec({1, 1})}, 1e-2, 11);
    CHECK(cover.size() == 0);
    CHECK(retract(cover, vec({0.5, 0.5})).mode == RetractMode::identity);
}

TEST_CASE("field CSV has one row per grid point") {
    std::ostringstream out;
    write_field_csv(out, disk_cover(), 5);
    std::istringstream in(out.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "y0,y1,f0,f1,mode");
    std::size_t rows = 0;
    while (std::getline(in, line)) ++rows;
    CHECK(rows == 25);
}

TEST_CASE("cover construction rejects bad input") {
    const ConvexTarget disk = disk_target(vec({0, 0}), 1.0);
    CHECK(code_of([&] { build_cover(disk, {vec({-2, -2}), vec({2, 2})}, 0.0); }) == ErrorCode::invalid_input);
    CHECK(code_of([&] { build_cover(disk, {vec({-2, -2}), vec({2, 2})}, 1e-9); }) == ErrorCode::invalid_input);
    CHECK(code_of([&] { build_cover(disk, {vec({-2}), vec({2})}, 1e-2); }) == ErrorCode::invalid_input);
    CHECK(code_of([&] { retract(disk_cover(), vec({1, 2, 3})); }) == ErrorCode::invalid_input);
}
