#pragma once

#include <cmath>
#include <stdexcept>

namespace lsurf {

// Global problem configuration: dimension, the constant in H + <X,N> = lambda,
// integrator tolerances and divergence guards.
struct Params {
    int n = 2;              // ambient dimension of the hypersurface (>= 2)
    double lambda = -0.05;  // lambda <= 0; lambda == 0 is the self-shrinker mode
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double event_tol_s = 1e-12;  // arc-length tolerance for event localization
    double z_ceiling = 0.0;      // divergence guard on z; 0 -> derived default
    double s_max = 0.0;          // arc-length budget; 0 -> derived default
    double axis_eps = 1e-6;      // series-launch offset / axis floor
    double max_step = 0.25;      // step-size cap for the adaptive integrator

    // Radius of the exact sphere solution, positive root of a^2 + lambda*a - n = 0.
    double sphere_radius() const {
        return 0.5 * (-lambda + std::sqrt(lambda * lambda + 4.0 * n));
    }

    // Radius of the exact cylinder solution, positive root of a^2 + lambda*a - (n-1) = 0.
    double cylinder_radius() const {
        return 0.5 * (-lambda + std::sqrt(lambda * lambda + 4.0 * (n - 1)));
    }

    // Positive root of z^2 - lambda*z - (n-1) = 0; upper bound for the height of the
    // second vertical tangent. Equals cylinder_radius() when lambda == 0.
    double conjugate_cylinder_radius() const {
        return 0.5 * (lambda + std::sqrt(lambda * lambda + 4.0 * (n - 1)));
    }

    void validate() const {
        if (n < 2) throw std::invalid_argument("Params: n must be >= 2");
        if (!(lambda <= 0.0)) throw std::invalid_argument("Params: lambda must be <= 0");
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw std::invalid_argument("Params: tolerances must be > 0");
        if (!(event_tol_s > 0.0))
            throw std::invalid_argument("Params: event_tol_s must be > 0");
        if (!(axis_eps > 0.0) || axis_eps >= 1e-2)
            throw std::invalid_argument("Params: axis_eps must be in (0, 1e-2)");
        if (!(z_ceiling > 0.0) || !(s_max > 0.0) || !(max_step > 0.0))
            throw std::invalid_argument("Params: guards must be > 0");
    }
};

// Params with the derived guard defaults filled in.
inline Params make_params(int n, double lambda) {
    Params p;
    p.n = n;
    p.lambda = lambda;
    p.z_ceiling = 4.0 * p.sphere_radius() + 10.0;
    p.s_max = 100.0 * p.sphere_radius();
    p.validate();
    return p;
}

// Lemma-regime predicate for the initial height: b > -(4n+1)*lambda.
inline bool b_in_regime(double b, const Params& p) {
    return b > -(4.0 * p.n + 1.0) * p.lambda;
}

}  // namespace lsurf
