#pragma once

#include <optional>
#include <vector>

#include "lsurf/curve.hpp"
#include "lsurf/ode.hpp"
#include "lsurf/params.hpp"

namespace lsurf {

// Tangent-angle events to watch during a trace. theta is unwrapped, so the
// targets are absolute values (pi, 3*pi/2, 2*pi, ...).
struct ThetaWatch {
    double target;
    EventKind kind;
    bool terminal;
};

struct EventSpec {
    std::vector<ThetaWatch> theta_watches;
    bool record_z_axis_crossings = false;  // record x == 0 as ZAxisCrossing
    bool stop_below_axis = true;           // z <= axis floor halts with AxisApproach
    std::optional<double> stop_at_s;       // optional plain arc-length stop
};

struct IntegrateResult {
    DenseBranch branch;
    StopReason reason;
    std::optional<Event> terminal;  // set when reason is ThetaTarget or AxisApproach
    std::size_t steps_accepted = 0;
    std::size_t steps_rejected = 0;
};

// Adaptive Dormand-Prince 5(4) with dense output. Events are bracketed on the
// dense interpolant and bisected to p.event_tol_s in s. Guards: z above
// p.z_ceiling, arc length beyond p.s_max, and a step-size floor; all three are
// reported through StopReason rather than thrown.
IntegrateResult integrate(const CurveState& start, const Params& p, const EventSpec& spec);

}  // namespace lsurf
