#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lsurf/shooting.hpp"
#include "oracle.hpp"
#include "pinned_values.hpp"

using namespace lsurf;

TEST_CASE("adaptive integrator matches the fixed-step reference") {
    const Params p = make_params(2, 0.0);
    const ShotReport lib = shoot(0.1, p);
    const oracle::Shot ref = oracle::shoot(0.1, 2, 0.0, 1e-4);

    REQUIRE(lib.s1.has_value());
    REQUIRE(lib.s2.has_value());
    REQUIRE(ref.end == oracle::End::SecondVerticalTangent);

    CHECK(std::abs(lib.s1->state.s - ref.s1) < 1e-8);
    CHECK(std::abs(lib.s1->state.x - ref.x1) < 1e-8);
    CHECK(std::abs(lib.s1->state.z - ref.z1) < 1e-8);
    REQUIRE(lib.sm.has_value());
    CHECK(std::abs(lib.sm->state.s - ref.sm) < 1e-8);
    CHECK(std::abs(lib.s2->state.s - ref.s2) < 1e-8);
    CHECK(std::abs(lib.s2->state.x - ref.x2) < 1e-8);
    CHECK(std::abs(lib.s2->state.z - ref.z2) < 1e-8);
}

TEST_CASE("reference is self-consistent under step halving") {
    const oracle::Shot a = oracle::shoot(0.1, 2, -0.05, 1e-4);
    const oracle::Shot b = oracle::shoot(0.1, 2, -0.05, 5e-5);
    REQUIRE(a.end == oracle::End::SecondVerticalTangent);
    REQUIRE(b.end == oracle::End::SecondVerticalTangent);
    CHECK(std::abs(a.s2 - b.s2) < 1e-11);
    CHECK(std::abs(a.x2 - b.x2) < 1e-11);
}

TEST_CASE("tolerance tightening converges toward the reference") {
    const oracle::Shot ref = oracle::shoot(0.1, 2, 0.0, 1e-5);
    double prev = 1e9;
    for (double rel : {1e-6, 1e-7, 1e-8, 1e-9, 1e-10}) {
        Params p = make_params(2, 0.0);
        p.rel_tol = rel;
        p.abs_tol = rel * 1e-2;
        const ShotReport lib = shoot(0.1, p);
        REQUIRE(lib.s2.has_value());
        const double err = std::abs(lib.s2->state.x - ref.x2) +
                           std::abs(lib.s2->state.s - ref.s2);
        CAPTURE(rel);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 1e-9);
}

TEST_CASE("library critical heights sit on the pinned reference values") {
    CHECK(std::abs(find_critical_height(make_params(2, 0.0)).bisect.b0 -
                   pinned::kB0N2Lambda0) < 1e-6);
    CHECK(std::abs(find_critical_height(make_params(2, -0.05)).bisect.b0 -
                   pinned::kB0N2Lambda005) < 1e-6);
    CHECK(std::abs(find_critical_height(make_params(2, -0.10)).bisect.b0 -
                   pinned::kB0N2Lambda01) < 1e-6);
    CHECK(std::abs(find_critical_height(make_params(3, -0.05)).bisect.b0 -
                   pinned::kB0N3Lambda005) < 1e-6);
}

TEST_CASE("reference bisection at a coarse step already agrees to 1e-8") {
    const double ref = oracle::critical_b(0.2, 0.3, 2, 0.0, 1e-4, 1e-10);
    CHECK(std::abs(ref - pinned::kB0N2Lambda0) < 1e-8);
}

TEST_CASE("axis-hit extrapolation matches the exact circle") {
    const Params p = make_params(2, -0.05);
    const double a = p.sphere_radius();
    const oracle::Shot ref = oracle::shoot(a, 2, -0.05, 1e-4);
    REQUIRE(ref.end == oracle::End::Axis);
    CHECK(std::abs(ref.x_at_axis + a) < 1e-6);

    const ShotReport lib = shoot(a, p);
    REQUIRE(lib.terminal == TerminalClass::AxisHit);
    REQUIRE(lib.x_at_axis.has_value());
    CHECK(std::abs(*lib.x_at_axis - ref.x_at_axis) < 1e-5);
}
