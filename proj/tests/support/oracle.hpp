#pragma once

// Fixed-step classical RK4 reference for the profile equation. Deliberately
// separate from the library: its own right-hand side, its own series launch
// (offset 1e-4 instead of axis_eps), its own cubic-Hermite event refinement.
// Exists to freeze regression values and to cross-check the adaptive
// integrator; accuracy is O(h^4) globally, so h = 1e-4 is already at the
// double-precision floor for these arc lengths.

namespace oracle {

enum class End {
    SecondVerticalTangent,  // theta reached 2*pi with z > 0
    Axis,                   // z fell to the floor first
    Budget,                 // arc-length budget or a safety guard tripped
};

struct Shot {
    End end = End::Budget;
    double s1 = 0.0, x1 = 0.0, z1 = 0.0;  // first theta = pi crossing
    bool has_sm = false;
    double sm = 0.0, xm = 0.0, zm = 0.0;  // first theta = 3*pi/2 crossing
    int sm_crossings = 0;
    double s2 = 0.0, x2 = 0.0, z2 = 0.0;  // theta = 2*pi (SecondVerticalTangent only)
    double x_at_axis = 0.0;               // tangent-extrapolated x at z = 0 (Axis only)
};

Shot shoot(double b, int n, double lambda, double h, double s_budget = 60.0);

// Bisection on the positive class (theta reached 2*pi, one horizontal tangent,
// x(s2) > 0) over [b_lo, b_hi]; b_lo must classify positive and b_hi not.
double critical_b(double b_lo, double b_hi, int n, double lambda, double h,
                  double tol_b);

}  // namespace oracle
