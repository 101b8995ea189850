#include "lsurf/ode.hpp"

#include <cmath>

#include "lsurf/errors.hpp"

namespace lsurf {

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::VerticalTangent: return "vertical_tangent";
        case EventKind::HorizontalTangent: return "horizontal_tangent";
        case EventKind::XAxisApproach: return "x_axis_approach";
        case EventKind::ZAxisCrossing: return "z_axis_crossing";
    }
    return "unknown";
}

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::ThetaTarget: return "theta_target";
        case StopReason::AxisApproach: return "axis_approach";
        case StopReason::ZCeiling: return "z_ceiling";
        case StopReason::SBudget: return "s_budget";
        case StopReason::SStop: return "s_stop";
        case StopReason::StepSizeUnderflow: return "step_size_underflow";
    }
    return "unknown";
}

Derivative rhs(const CurveState& state, const Params& p) {
    if (!(state.z > 0.0))
        throw AxisSingularityError("rhs: z must be positive, got z=" + std::to_string(state.z));
    const double c = std::cos(state.theta);
    const double si = std::sin(state.theta);
    return Derivative{c, si,
                      p.lambda + state.x * si - (state.z - (p.n - 1) / state.z) * c};
}

double equation_residual(const CurveState& state, double dtheta_ds, const Params& p) {
    if (!(state.z > 0.0))
        throw AxisSingularityError("equation_residual: z must be positive");
    const double c = std::cos(state.theta);
    const double si = std::sin(state.theta);
    return dtheta_ds - p.lambda - state.x * si + (state.z - (p.n - 1) / state.z) * c;
}

ChartDerivatives chart_derivatives(const CurveState& state, const Params& p) {
    const double si = std::sin(state.theta);
    if (std::abs(si) < 1e-12)
        throw VerticalTangentError("chart_derivatives: vertical tangent, |sin theta| < 1e-12");
    const double dtheta = rhs(state, p).dtheta;
    const double c = std::cos(state.theta);
    return ChartDerivatives{c / si, -dtheta / (si * si * si)};
}

namespace {
constexpr double kPi = 3.14159265358979323846;
}

CurveState axis_series_start(double b, const Params& p) {
    if (!(b > 0.0)) throw Error("axis_series_start: b must be > 0");
    const double s = p.axis_eps * std::max(1.0, b);
    const double k = (b + p.lambda) / p.n;  // theta'(0) from the axis limit of the ODE
    CurveState st;
    st.s = s;
    st.x = b - 0.5 * k * s * s;
    st.z = s;
    st.theta = kPi / 2.0 + k * s;
    return st;
}

DenseBranch circle_branch(const Params& p, double s0, double s1, std::size_t nodes) {
    const double r = p.sphere_radius();
    return analytic_branch(
        [r](double s) {
            CurveState st;
            st.s = s;
            st.x = r * std::cos(s / r);
            st.z = r * std::sin(s / r);
            st.theta = kPi / 2.0 + s / r;
            return st;
        },
        s0, s1, nodes);
}

DenseBranch cylinder_branch(const Params& p, double x0, double length, std::size_t nodes) {
    const double r = p.cylinder_radius();
    return analytic_branch(
        [r, x0](double s) {
            CurveState st;
            st.s = s;
            st.x = x0 - s;
            st.z = r;
            st.theta = kPi;
            return st;
        },
        0.0, length, nodes);
}

DenseBranch plane_branch(const Params& p, double s0, double s1, std::size_t nodes) {
    if (p.lambda != 0.0) throw Error("plane_branch: the plane solves the equation only for lambda = 0");
    return analytic_branch(
        [](double s) {
            CurveState st;
            st.s = s;
            st.x = 0.0;
            st.z = s;
            st.theta = kPi / 2.0;
            return st;
        },
        s0, s1, nodes);
}

}  // namespace lsurf
