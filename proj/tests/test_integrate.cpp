#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "lsurf/integrate.hpp"
#include "lsurf/ode.hpp"

using namespace lsurf;

namespace {

constexpr double kPi = 3.14159265358979323846;

EventSpec first_branch_spec() {
    EventSpec spec;
    spec.theta_watches = {{kPi, EventKind::VerticalTangent, true}};
    spec.record_z_axis_crossings = true;
    return spec;
}

}  // namespace

TEST_CASE("circle start reproduces the first vertical tangent event") {
    const Params p = make_params(2, 0.0);
    const double a = p.sphere_radius();
    const CurveState start = circle_branch(p, 0.1, 1.0).eval(0.1);

    const IntegrateResult r = integrate(start, p, first_branch_spec());
    REQUIRE(r.reason == StopReason::ThetaTarget);
    REQUIRE(r.terminal.has_value());
    CHECK(r.terminal->kind == EventKind::VerticalTangent);
    // theta = pi/2 + s/a on the circle, so the event sits at s = a*pi/2.
    CHECK(std::abs(r.terminal->state.s - a * kPi / 2.0) < 1e-10);
    CHECK(std::abs(r.terminal->state.x) < 1e-10);
    CHECK(std::abs(r.terminal->state.z - a) < 1e-10);
    CHECK(std::abs(r.terminal->state.theta - kPi) < 1e-12);

    // Radius preservation along the dense output.
    double worst = 0.0;
    for (int k = 0; k <= 400; ++k) {
        const double s = 0.1 + (r.branch.s_end() - 0.1) * k / 400.0;
        const CurveState st = r.branch.eval(s);
        worst = std::fmax(worst, std::abs(std::hypot(st.x, st.z) - a));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("axis launch at the sphere radius closes through the axis") {
    const Params p = make_params(2, 0.0);
    const double a = p.sphere_radius();

    EventSpec spec;
    spec.theta_watches = {{kPi, EventKind::VerticalTangent, false},
                          {1.5 * kPi, EventKind::HorizontalTangent, false}};
    const IntegrateResult r = integrate(axis_series_start(a, p), p, spec);

    REQUIRE(r.reason == StopReason::AxisApproach);
    REQUIRE(r.terminal.has_value());
    CHECK(r.terminal->kind == EventKind::XAxisApproach);
    CHECK(std::abs(r.terminal->state.x + a) < 1e-6);
    CHECK(std::abs(r.terminal->state.theta - 1.5 * kPi) < 1e-4);

    double worst = 0.0;
    for (int k = 0; k <= 400; ++k) {
        const double s = r.branch.s_begin() +
                         (r.branch.s_end() - r.branch.s_begin()) * k / 400.0;
        const CurveState st = r.branch.eval(s);
        worst = std::fmax(worst, std::abs(st.x * st.x + st.z * st.z - a * a));
    }
    CHECK(worst < 1e-8);
}

TEST_CASE("z-axis crossings are recorded") {
    const Params p = make_params(2, 0.0);
    const IntegrateResult r = integrate(axis_series_start(0.1, p), p, first_branch_spec());
    REQUIRE(r.reason == StopReason::ThetaTarget);
    bool found = false;
    for (const Event& ev : r.branch.events) {
        if (ev.kind != EventKind::ZAxisCrossing) continue;
        found = true;
        CHECK(std::abs(ev.state.x) < 1e-9);
        CHECK(ev.state.z > 1.0);
    }
    CHECK(found);
}

TEST_CASE("dense output is continuous and arc-length consistent") {
    const Params p = make_params(2, 0.0);
    const IntegrateResult r = integrate(axis_series_start(0.1, p), p, first_branch_spec());
    const double s0 = r.branch.s_begin();
    const double s1 = r.branch.s_end();

    const double ds = 1e-3;
    double prev_theta = r.branch.eval(s0).theta;
    double worst_arc = 0.0;
    for (double s = s0 + ds; s < s1; s += ds) {
        const CurveState u = r.branch.eval(s - ds);
        const CurveState v = r.branch.eval(s);
        CHECK(std::abs(v.theta - prev_theta) < 0.02);
        prev_theta = v.theta;
        const double step = std::hypot(v.x - u.x, v.z - u.z);
        worst_arc = std::fmax(worst_arc, std::abs(step / ds - 1.0));
    }
    // |gamma'| = 1 by construction; the dense interpolant must agree.
    CHECK(worst_arc < 1e-5);
}

TEST_CASE("launch offset halving does not move the first vertical tangent") {
    Params p1 = make_params(2, 0.0);
    Params p2 = p1;
    p2.axis_eps = p1.axis_eps / 2.0;

    const IntegrateResult r1 = integrate(axis_series_start(0.1, p1), p1, first_branch_spec());
    const IntegrateResult r2 = integrate(axis_series_start(0.1, p2), p2, first_branch_spec());
    REQUIRE(r1.terminal.has_value());
    REQUIRE(r2.terminal.has_value());
    const double tol = 10.0 * p1.abs_tol;
    CHECK(std::abs(r1.terminal->state.s - r2.terminal->state.s) < tol);
    CHECK(std::abs(r1.terminal->state.x - r2.terminal->state.x) < tol);
    CHECK(std::abs(r1.terminal->state.z - r2.terminal->state.z) < tol);
}

TEST_CASE("guards stop the trace with the right reason") {
    Params p = make_params(2, 0.0);

    Params budget = p;
    budget.s_max = 0.5;
    const IntegrateResult rb = integrate(axis_series_start(0.1, budget), budget,
                                         first_branch_spec());
    CHECK(rb.reason == StopReason::SBudget);
    CHECK(rb.branch.s_end() <= 0.5 + 1e-12);

    Params low = p;
    low.z_ceiling = 1.5;
    const IntegrateResult rc = integrate(axis_series_start(0.1, low), low,
                                         first_branch_spec());
    CHECK(rc.reason == StopReason::ZCeiling);

    EventSpec stop = first_branch_spec();
    stop.stop_at_s = 1.0;
    const IntegrateResult rs = integrate(axis_series_start(0.1, p), p, stop);
    CHECK(rs.reason == StopReason::SStop);
    CHECK(rs.branch.s_end() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("steps respect the max step cap") {
    const Params p = make_params(2, 0.0);
    const IntegrateResult r = integrate(axis_series_start(0.3, p), p, first_branch_spec());
    for (const DenseStep& st : r.branch.steps) CHECK(st.h <= p.max_step + 1e-12);
    CHECK(r.steps_accepted == r.branch.steps.size());
}
