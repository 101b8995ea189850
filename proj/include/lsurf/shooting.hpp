#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lsurf/integrate.hpp"

namespace lsurf {

// How a shot ended and how it classifies for the bisection on b.
enum class TerminalClass {
    SecondVerticalTangent,  // theta reached 2*pi with z > 0
    AxisHit,                // z fell to the axis floor first
    Diverged,               // z ran into the ceiling guard
    Anomalous,              // guard exhaustion, step underflow, or a structure violation
};

const char* to_string(TerminalClass c);

struct ShotReport {
    double b = 0.0;
    TerminalClass terminal = TerminalClass::Anomalous;
    std::string anomaly;         // reason text when terminal == Anomalous
    bool regime_warning = false; // b <= -(4n+1)*lambda

    DenseBranch first;            // launch to the first vertical tangent (theta == pi)
    std::optional<DenseBranch> second;

    std::optional<Event> s1;      // theta == pi
    std::optional<Event> sm;      // theta == 3*pi/2 (unique horizontal tangent)
    std::optional<Event> s2;      // theta == 2*pi
    std::vector<Event> z_axis_crossings;  // x == 0 on either branch, in s order
    std::optional<double> x_at_axis;      // AxisHit: x linearly extrapolated to z = 0

    // Membership in the shooting set: the second vertical tangent exists, the
    // horizontal tangent was crossed exactly once, and x(s2) > 0.
    bool positive() const {
        return terminal == TerminalClass::SecondVerticalTangent && sm.has_value() &&
               s2.has_value() && s2->state.x > 0.0;
    }

    // Shooting functional F(b) = x(s2); only defined for shots that reach s2.
    std::optional<double> shoot_value() const {
        if (!s2) return std::nullopt;
        return s2->state.x;
    }
};

struct FirstBranchResult {
    DenseBranch branch;
    std::optional<Event> s1;
    StopReason reason;
};

struct SecondBranchResult {
    DenseBranch branch;
    std::optional<Event> s2;
    std::vector<Event> horizontal_tangents;
    StopReason reason;
    std::optional<double> x_at_axis;
};

// Integrate from the axis launch until theta reaches pi (records x == 0
// crossings on the way).
FirstBranchResult trace_first_branch(double b, const Params& p);

// Continue from the first vertical tangent until theta reaches 2*pi, the axis
// floor, or a guard. Watches theta == 3*pi/2 and x == 0 along the way.
SecondBranchResult trace_second_branch(const Event& s1, const Params& p);

// Full shot: both branches plus classification.
ShotReport shoot(double b, const Params& p);

struct GridPoint {
    double b;
    TerminalClass cls;
    bool positive;
    std::optional<double> shoot_value;
};

struct Bracket {
    double b_lo = 0.0;  // Positive
    double b_hi = 0.0;  // not Positive
    std::vector<GridPoint> scan;       // full classification table
    std::size_t flip_count = 0;        // number of Positive -> non-Positive adjacencies
};

// Classify shots over a geometric grid on [b_min, b_max] and return the lowest
// Positive -> non-Positive adjacency. Throws NoBracketError when the
// classification never flips.
Bracket bracket_scan(const Params& p, double b_min, double b_max, std::size_t grid);

// Default lower end of the scan grid.
double default_b_min(const Params& p);

struct BisectResult {
    double b0 = 0.0;
    ShotReport shot;                 // shot at b0, |x(s2)| <= tol_F
    std::size_t iterations = 0;
    double bracket_width = 0.0;
    std::vector<GridPoint> history;  // midpoints in evaluation order
};

// Bisection on the shot classification inside a bracket. Converges on the
// critical initial height b0 where x(s2) = 0. Throws ClassFlipAnomalyError if
// a midpoint shot is Anomalous.
BisectResult bisect_b0(const Params& p, const Bracket& bracket, double tol_b = 1e-12,
                       double tol_F = 1e-9);

struct ProfilePoint {
    double t;      // arc parameter along the closed profile, 0 at (b0, 0)
    double x;
    double z;
    double theta;  // tangent angle, continuous across the mirror junction
};

// Closed profile at the critical height: the traced half (launch to the
// perpendicular z-axis meeting) plus its (-x, z) mirror traversed back to the
// axis. The junction is snapped to x = 0 exactly.
struct ClosedProfile {
    double b0 = 0.0;
    Params params;
    ShotReport shot;          // the defining shot
    double s_half = 0.0;      // arc length of the half profile (launch series segment included)
    std::vector<ProfilePoint> full;  // resampled closed point sequence, mirror included
    std::vector<std::array<double, 2>> self_intersections;  // filled by the verify pass

    // State at arc parameter t in [0, 2*s_half]; t > s_half maps to the mirror.
    ProfilePoint sample(double t) const;
};

// Assemble the closed profile from a converged shot. Throws
// JunctionMismatchError when |x(s2)| > tol_F.
ClosedProfile close_profile(const ShotReport& shot, const Params& p, double tol_F = 1e-9);

// Resampled points at arc spacing <= h; sub-arc endpoints (launch point, first
// vertical tangent, junction, mirrors) are always included exactly.
std::vector<ProfilePoint> resample_profile(const ClosedProfile& profile, double h);

struct FindResult {
    Bracket bracket;
    BisectResult bisect;
    ClosedProfile profile;
    double b_min_used = 0.0;  // window that produced the bracket
    double b_max_used = 0.0;
    int window_slides = 0;    // times the scan window moved before bracketing
};

// End-to-end critical-height pipeline: scan, bracket, bisect, close. Zero
// b_min/b_max select the defaults (default_b_min and the sphere radius). When
// every grid point classifies non-Positive the window slides down (b0 can sit
// below -(4n+2)*lambda); when every point is Positive it slides up toward the
// sphere radius.
FindResult find_critical_height(const Params& p, double b_min = 0.0, double b_max = 0.0,
                                std::size_t grid = 24, double tol_b = 1e-12,
                                double tol_F = 1e-9);

}  // namespace lsurf
