#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lsurf/errors.hpp"
#include "lsurf/ode.hpp"
#include "lsurf/params.hpp"

using namespace lsurf;

namespace {
constexpr double kPi = 3.14159265358979323846;

CurveState at(double x, double z, double theta) {
    CurveState st;
    st.x = x;
    st.z = z;
    st.theta = theta;
    return st;
}
}  // namespace

TEST_CASE("radii solve their defining quadratics") {
    for (int n : {2, 3, 5}) {
        for (double lambda : {0.0, -0.05, -0.5}) {
            const Params p = make_params(n, lambda);
            const double a = p.sphere_radius();
            const double c = p.cylinder_radius();
            const double q = p.conjugate_cylinder_radius();
            CHECK(std::abs(a * a + lambda * a - n) < 1e-12);
            CHECK(std::abs(c * c + lambda * c - (n - 1)) < 1e-12);
            CHECK(std::abs(q * q - lambda * q - (n - 1)) < 1e-12);
            CHECK(a > c);
            // The conjugate root shrinks as lambda goes negative; it reaches
            // the cylinder radius only at lambda = 0.
            CHECK(q <= c);
        }
    }
    const Params p = make_params(2, 0.0);
    CHECK(p.sphere_radius() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK(p.cylinder_radius() == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("params validation rejects bad input") {
    CHECK_THROWS_AS(make_params(1, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(make_params(2, 0.1), std::invalid_argument);
    Params p = make_params(2, 0.0);
    p.axis_eps = 1e-1;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
    p = make_params(2, 0.0);
    p.rel_tol = 0.0;
    CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("rhs matches the tangent-angle equation") {
    const Params p = make_params(2, -0.1);
    const Derivative d = rhs(at(1.0, 2.0, kPi / 2.0), p);
    CHECK(d.dx == doctest::Approx(0.0).epsilon(1e-15));
    CHECK(d.dz == doctest::Approx(1.0).epsilon(1e-15));
    // theta' = lambda + x*1 - (z - 1/z)*0
    CHECK(d.dtheta == doctest::Approx(0.9).epsilon(1e-12));

    const Derivative dpi = rhs(at(1.0, 2.0, kPi), p);
    CHECK(dpi.dx == doctest::Approx(-1.0).epsilon(1e-15));
    // theta' = lambda + (z - 1/z) at theta = pi
    CHECK(dpi.dtheta == doctest::Approx(1.4).epsilon(1e-12));
}

TEST_CASE("rhs refuses the axis") {
    const Params p = make_params(2, 0.0);
    CHECK_THROWS_AS(rhs(at(1.0, 0.0, kPi / 2.0), p), AxisSingularityError);
    CHECK_THROWS_AS(rhs(at(1.0, -0.5, kPi / 2.0), p), AxisSingularityError);
}

TEST_CASE("exact solutions have zero residual with analytic theta'") {
    for (int n : {2, 3, 5}) {
        for (double lambda : {0.0, -0.05, -0.5}) {
            const Params p = make_params(n, lambda);
            const double a = p.sphere_radius();
            const DenseBranch circle = circle_branch(p, 0.05 * a, (kPi - 0.05) * a);
            const DenseBranch cyl = cylinder_branch(p, -1.0, 2.0);
            for (int k = 1; k < 50; ++k) {
                const double t = static_cast<double>(k) / 50.0;
                const CurveState cs =
                    circle.eval(circle.s_begin() + t * (circle.s_end() - circle.s_begin()));
                CHECK(std::abs(equation_residual(cs, 1.0 / a, p)) < 1e-12);
                const CurveState cy =
                    cyl.eval(cyl.s_begin() + t * (cyl.s_end() - cyl.s_begin()));
                CHECK(std::abs(equation_residual(cy, 0.0, p)) < 1e-12);
            }
        }
    }
    const Params p0 = make_params(2, 0.0);
    const DenseBranch plane = plane_branch(p0, 0.1, 2.0);
    for (int k = 0; k <= 20; ++k) {
        const CurveState st = plane.eval(0.1 + 1.9 * k / 20.0);
        CHECK(std::abs(equation_residual(st, 0.0, p0)) < 1e-15);
    }
}

TEST_CASE("residual is nonzero away from a trajectory") {
    const Params p = make_params(2, 0.0);
    const double a = p.sphere_radius();
    const CurveState st = circle_branch(p, 0.1, 1.0).eval(0.5);
    CHECK(std::abs(equation_residual(st, 1.0 / a + 0.25, p)) > 0.2);
}

TEST_CASE("plane branch needs lambda = 0") {
    const Params p = make_params(2, -0.05);
    CHECK_THROWS_AS(plane_branch(p, 0.1, 1.0), Error);
}

TEST_CASE("chart derivatives") {
    // x = sqrt(2), z = 1, theta = 3pi/4, n = 2, lambda = 0 gives theta' = 1:
    // slope cos/sin = -1, second derivative -theta'/sin^3 = -2*sqrt(2).
    const Params p = make_params(2, 0.0);
    const ChartDerivatives cd = chart_derivatives(at(std::sqrt(2.0), 1.0, 0.75 * kPi), p);
    CHECK(cd.slope == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(cd.second == doctest::Approx(-2.0 * std::sqrt(2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(chart_derivatives(at(1.0, 1.0, kPi), p), VerticalTangentError);
}

TEST_CASE("axis series launch") {
    const Params p = make_params(2, 0.0);
    const double b = std::sqrt(2.0);
    const CurveState st = axis_series_start(b, p);
    const double s = p.axis_eps * b;
    CHECK(st.s == doctest::Approx(s).epsilon(1e-15));
    CHECK(st.z == doctest::Approx(s).epsilon(1e-15));
    CHECK(st.theta == doctest::Approx(kPi / 2.0 + (b / 2.0) * s).epsilon(1e-15));
    CHECK(st.x == doctest::Approx(b - 0.25 * b * s * s).epsilon(1e-15));
    CHECK_THROWS_AS(axis_series_start(0.0, p), Error);
    CHECK_THROWS_AS(axis_series_start(-1.0, p), Error);
}

TEST_CASE("analytic branch eval clamps and interpolates") {
    const Params p = make_params(2, 0.0);
    const DenseBranch br = circle_branch(p, 0.2, 1.2);
    CHECK(br.eval(0.0).s == doctest::Approx(0.2));
    CHECK(br.eval(5.0).s == doctest::Approx(1.2));
    const double a = p.sphere_radius();
    const CurveState mid = br.eval(0.7);
    CHECK(mid.x == doctest::Approx(a * std::cos(0.7 / a)).epsilon(1e-12));
    CHECK(mid.z == doctest::Approx(a * std::sin(0.7 / a)).epsilon(1e-12));
}
