#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace lsurf {

// Point on the profile curve in tangent-angle form. theta is kept continuous
// (unwrapped): pi/2 at the launch, pi at the first vertical tangent, 2*pi at
// the second. By construction x'^2 + z'^2 = cos^2 + sin^2 = 1.
struct CurveState {
    double s = 0.0;      // arc length
    double x = 0.0;      // coordinate along the rotation axis
    double z = 0.0;      // distance from the rotation axis (z > 0 off the axis)
    double theta = 0.0;  // tangent angle: dx/ds = cos(theta), dz/ds = sin(theta)
};

enum class EventKind {
    VerticalTangent,    // theta == 0 (mod pi): dz/ds = 0
    HorizontalTangent,  // theta == pi/2 (mod pi): dx/ds = 0
    XAxisApproach,      // z reached the axis floor
    ZAxisCrossing,      // x == 0
};

const char* to_string(EventKind k);

struct Event {
    EventKind kind;
    CurveState state;
    double theta_target = 0.0;  // for tangent events: the theta value crossed
};

// Why integration stopped.
enum class StopReason {
    ThetaTarget,        // a terminal tangent-angle event fired
    AxisApproach,       // z fell to the axis floor
    ZCeiling,           // z exceeded the divergence guard
    SBudget,            // ran out of arc length (s_max)
    SStop,              // reached an explicit stop arc length
    StepSizeUnderflow,  // step control collapsed below machine resolution
};

const char* to_string(StopReason r);

// One accepted step of the embedded pair together with its dense-output
// coefficients. The interpolant over [s0, s0+h] is
//   u(t) = c0 + t*(c1 + (1-t)*(c2 + t*(c3 + (1-t)*c4))),  t = (s-s0)/h,
// exact at both endpoints, locally order 4 inside.
struct DenseStep {
    double s0 = 0.0;
    double h = 0.0;
    std::array<std::array<double, 3>, 5> c{};  // c[k] = {x,z,theta} coefficient k
};

enum class BranchKind { First, Second, Analytic };

// Dense-output segment of the trajectory: ordered node states plus per-step
// interpolation, or a closed-form rule for the exact solutions.
struct DenseBranch {
    BranchKind kind = BranchKind::First;
    std::vector<CurveState> states;  // accepted nodes, strictly increasing s
    std::vector<DenseStep> steps;
    std::vector<Event> events;       // recorded (non-terminal and terminal) events
    std::function<CurveState(double)> analytic;  // set only for BranchKind::Analytic

    double s_begin() const { return states.front().s; }
    double s_end() const { return states.back().s; }

    // Interpolated state at arc length s (clamped to [s_begin, s_end]).
    CurveState eval(double s) const;
};

// Analytic branches for the exact solutions; used by fixtures and the
// residual checks.
DenseBranch analytic_branch(std::function<CurveState(double)> rule, double s0, double s1,
                            std::size_t nodes);

}  // namespace lsurf
