#include <doctest.h>

#include <cmath>

#include <gridsight/platform.hpp>

#include "oracles.hpp"
#include "test_rng.hpp"

using namespace gridsight;
using testsupport::TestRng;

TEST_SUITE("platform") {

TEST_CASE("thrust_per_motor reproduces the design value") {
    CHECK(thrust_per_motor({25963.0, 1.1, 4}) == doctest::Approx(14279.65).epsilon(1e-9));
    CHECK(thrust_per_motor({1000.0, 1.0, 2}) == doctest::Approx(1000.0));
    CHECK(thrust_per_motor({777.0, 0.5, 1}) == doctest::Approx(777.0));
}

TEST_CASE("thrust_per_motor validates the motor count") {
    CHECK_THROWS_AS(thrust_per_motor({1000.0, 1.0, 0}), InvalidArgumentError);
}

TEST_CASE("thrust_per_motor scales linearly in weight and alpha, inversely in motors") {
    CHECK(thrust_per_motor({2000.0, 1.1, 4}) == doctest::Approx(2.0 * thrust_per_motor({1000.0, 1.1, 4})));
    CHECK(thrust_per_motor({1000.0, 2.2, 4}) == doctest::Approx(2.0 * thrust_per_motor({1000.0, 1.1, 4})));
    CHECK(thrust_per_motor({1000.0, 1.1, 8}) == doctest::Approx(0.5 * thrust_per_motor({1000.0, 1.1, 4})));
    // exact on integer-friendly inputs
    CHECK(thrust_per_motor({1024.0, 2.0, 4}) == 1024.0);
}

TEST_CASE("total_mass sums the component table") {
    const MassBudget table1{{
        {"thermal camera", 72, 1},
        {"camera", 116, 1},
        {"laser sensors", 850, 12},
        {"robot arm 6dof", 940, 2},
        {"robot arm 4dof", 640, 2},
        {"drone motor", 1038, 4},
        {"drone frame", 12000, 1},
        {"imu gps", 180, 1},
        {"dev board", 263, 1},
    }};
    CHECK(total_mass(table1) == 30143.0);
    CHECK(total_mass(MassBudget{}) == 0.0);
    CHECK(total_mass(MassBudget{{{"x", 100.0, 3}}}) == 300.0);
}

TEST_CASE("total_mass is permutation invariant") {
    MassBudget a{{{"p", 10.5, 2}, {"q", 3.25, 4}, {"r", 99.0, 1}}};
    MassBudget b{{{"r", 99.0, 1}, {"p", 10.5, 2}, {"q", 3.25, 4}}};
    CHECK(total_mass(a) == total_mass(b));
}

TEST_CASE("total_mass validates items") {
    CHECK_THROWS_AS(total_mass(MassBudget{{{"bad", -1.0, 1}}}), InvalidArgumentError);
    CHECK_THROWS_AS(total_mass(MassBudget{{{"bad", 1.0, 0}}}), InvalidArgumentError);
}

TEST_CASE("alignment_angle of equal readings is zero") {
    CHECK(alignment_angle({{1.0, 1.0, 1.0}, 0.1}) == 0.0);
}

TEST_CASE("alignment_angle of collinear readings equals the slope arctangent") {
    CHECK(alignment_angle({{1.0, 1.1, 1.2}, 0.1}) == doctest::Approx(std::atan(1.0)).epsilon(1e-12));
    CHECK(alignment_angle({{1.0, 1.1, 1.2}, 0.1}) == doctest::Approx(0.785398).epsilon(1e-5));
}

TEST_CASE("alignment_angle matches the normal-equations oracle on noisy data") {
    const LaserReadings r{{1.0, 1.12, 1.2}, 0.1};
    const double slope =
        testsupport::normal_equations_slope({0.0, 0.1, 0.2}, {1.0, 1.12, 1.2});
    CHECK(alignment_angle(r) == doctest::Approx(std::atan(slope)).epsilon(1e-12));
}

TEST_CASE("alignment_angle is antisymmetric and shift invariant") {
    TestRng rng(91);
    for (int trial = 0; trial < 20; ++trial) {
        const double d0 = rng.uniform(0.5, 5.0);
        const double d1 = rng.uniform(0.5, 5.0);
        const double d2 = rng.uniform(0.5, 5.0);
        const double s = rng.uniform(0.05, 0.5);
        const double fwd = alignment_angle({{d0, d1, d2}, s});
        const double rev = alignment_angle({{d2, d1, d0}, s});
        CHECK(std::fabs(fwd + rev) < 1e-12);
        const double shifted = alignment_angle({{d0 + 2.0, d1 + 2.0, d2 + 2.0}, s});
        CHECK(std::fabs(fwd - shifted) < 1e-12);
    }
}

TEST_CASE("alignment_angle enforces the sensor range") {
    CHECK_THROWS_AS(alignment_angle({{0.1, 1.0, 1.0}, 0.1}), RangeError);
    CHECK_THROWS_AS(alignment_angle({{1.0, 35.0, 1.0}, 0.1}), RangeError);
    CHECK_THROWS_AS(alignment_angle({{1.0, 1.0, 1.0}, 0.0}), InvalidArgumentError);
}

} // TEST_SUITE
