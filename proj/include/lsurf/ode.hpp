#pragma once

#include "lsurf/curve.hpp"
#include "lsurf/params.hpp"

namespace lsurf {

struct Derivative {
    double dx;      // cos(theta)
    double dz;      // sin(theta)
    double dtheta;  // lambda + x*sin(theta) - (z - (n-1)/z)*cos(theta)
};

// Right-hand side of the profile ODE in tangent-angle form. Throws
// AxisSingularityError for z <= 0.
Derivative rhs(const CurveState& state, const Params& p);

// d(theta)/ds - lambda - x*sin(theta) + (z - (n-1)/z)*cos(theta); zero on
// trajectories of the profile equation.
double equation_residual(const CurveState& state, double dtheta_ds, const Params& p);

struct ChartDerivatives {
    double slope;   // dx/dz        = cos(theta)/sin(theta)
    double second;  // d^2x/dz^2    = -theta' / sin^3(theta)
};

// Graph derivatives of the branch x = gamma(z) (or x = beta(z) on the second
// branch). Throws VerticalTangentError when |sin theta| < 1e-12.
ChartDerivatives chart_derivatives(const CurveState& state, const Params& p);

// Launch state just off the axis from the series
//   x(s) = b - (b+lambda)/(2n) s^2 + O(s^4),
//   z(s) = s + O(s^3),
//   theta(s) = pi/2 + ((b+lambda)/n) s + O(s^3),
// evaluated at s = axis_eps * max(1, b).
CurveState axis_series_start(double b, const Params& p);

// Exact solutions, as analytic dense branches.

// Sphere of radius sphere_radius() through (r,0): x = r cos(s/r), z = r sin(s/r),
// theta = pi/2 + s/r, for s in [s0, s1] (subset of (0, pi r)).
DenseBranch circle_branch(const Params& p, double s0, double s1, std::size_t nodes = 257);

// Cylinder at height cylinder_radius(): x = x0 - s, z = const, theta = pi.
DenseBranch cylinder_branch(const Params& p, double x0, double length,
                            std::size_t nodes = 257);

// Plane x = 0 (lambda == 0 only): x = 0, z = s, theta = pi/2.
DenseBranch plane_branch(const Params& p, double s0, double s1, std::size_t nodes = 257);

}  // namespace lsurf
