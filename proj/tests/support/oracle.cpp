#include "oracle.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kZFloor = 1e-7;

struct State {
    double x, z, theta;
};

State deriv(const State& u, int n, double lambda) {
    const double st = std::sin(u.theta);
    const double ct = std::cos(u.theta);
    return {ct, st, lambda + u.x * st - (u.z - (n - 1) / u.z) * ct};
}

State axpy(const State& u, double a, const State& v) {
    return {u.x + a * v.x, u.z + a * v.z, u.theta + a * v.theta};
}

State rk4(const State& u, double h, int n, double lambda) {
    const State k1 = deriv(u, n, lambda);
    const State k2 = deriv(axpy(u, 0.5 * h, k1), n, lambda);
    const State k3 = deriv(axpy(u, 0.5 * h, k2), n, lambda);
    const State k4 = deriv(axpy(u, h, k3), n, lambda);
    return {u.x + h / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x),
            u.z + h / 6.0 * (k1.z + 2.0 * k2.z + 2.0 * k3.z + k4.z),
            u.theta + h / 6.0 * (k1.theta + 2.0 * k2.theta + 2.0 * k3.theta + k4.theta)};
}

// Cubic Hermite value at t in [0,1] from endpoint values and slopes (slopes
// already scaled by the step h).
double hermite(double y0, double y1, double m0, double m1, double t) {
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 +
           (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1;
}

struct Segment {
    double s0, h;
    State u0, u1;
    State d0, d1;  // derivatives at the endpoints

    double theta(double t) const {
        return hermite(u0.theta, u1.theta, h * d0.theta, h * d1.theta, t);
    }
    double z(double t) const { return hermite(u0.z, u1.z, h * d0.z, h * d1.z, t); }
    double x(double t) const { return hermite(u0.x, u1.x, h * d0.x, h * d1.x, t); }
};

// Bisect f(t) - target = 0 on [0,1] given opposite signs at the endpoints.
template <typename F>
double bisect01(const F& f, double target) {
    double lo = 0.0, hi = 1.0;
    double flo = f(lo) - target;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f(mid) - target;
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

Shot shoot(double b, int n, double lambda, double h, double s_budget) {
    if (!(b > 0.0) || !(h > 0.0)) throw std::invalid_argument("oracle: b, h must be > 0");

    // Series launch rederived from the axis limit: z ~ s, theta ~ pi/2 + k s
    // with k = (b + lambda)/n, x ~ b - k s^2 / 2. Offset chosen larger than
    // the library's axis_eps so the two launches are not the same code path.
    const double s_start = 1e-4 * std::fmax(1.0, b);
    const double k = (b + lambda) / n;
    State u{b - 0.5 * k * s_start * s_start, s_start, kPi / 2.0 + k * s_start};
    double s = s_start;

    Shot out;
    bool have_s1 = false;
    const double theta_floor = kPi / 2.0 - 0.5;  // retreat guard, exploratory shots only

    while (s < s_budget) {
        Segment seg;
        seg.s0 = s;
        seg.h = h;
        seg.u0 = u;
        seg.d0 = deriv(u, n, lambda);
        State next = rk4(u, h, n, lambda);

        if (!std::isfinite(next.x) || !std::isfinite(next.z) || !std::isfinite(next.theta) ||
            next.z <= kZFloor) {
            // Ran into the axis: follow the incoming tangent from the last
            // finite state down to z = 0.
            out.end = End::Axis;
            const double st = std::sin(u.theta);
            if (st >= 0.0) {
                out.end = End::Budget;  // not actually descending; give up honestly
                return out;
            }
            out.x_at_axis = u.x + std::cos(u.theta) * (-u.z / st);
            return out;
        }

        seg.u1 = next;
        seg.d1 = deriv(next, n, lambda);

        auto theta_at = [&seg](double t) { return seg.theta(t); };

        if (!have_s1 && u.theta < kPi && next.theta >= kPi) {
            const double t = bisect01(theta_at, kPi);
            out.s1 = s + t * h;
            out.x1 = seg.x(t);
            out.z1 = seg.z(t);
            have_s1 = true;
        }
        if (have_s1) {
            const bool up = u.theta < 1.5 * kPi && next.theta >= 1.5 * kPi;
            const bool down = u.theta >= 1.5 * kPi && next.theta < 1.5 * kPi;
            if (up || down) {
                ++out.sm_crossings;
                if (!out.has_sm) {
                    const double t = bisect01(theta_at, 1.5 * kPi);
                    out.sm = s + t * h;
                    out.xm = seg.x(t);
                    out.zm = seg.z(t);
                    out.has_sm = true;
                }
            }
            if (u.theta < 2.0 * kPi && next.theta >= 2.0 * kPi) {
                const double t = bisect01(theta_at, 2.0 * kPi);
                out.s2 = s + t * h;
                out.x2 = seg.x(t);
                out.z2 = seg.z(t);
                out.end = End::SecondVerticalTangent;
                return out;
            }
        }
        if (next.theta < theta_floor) {
            out.end = End::Budget;
            return out;
        }

        u = next;
        s += h;
    }
    out.end = End::Budget;
    return out;
}

double critical_b(double b_lo, double b_hi, int n, double lambda, double h, double tol_b) {
    auto positive = [&](double b) {
        const Shot sh = shoot(b, n, lambda, h);
        return sh.end == End::SecondVerticalTangent && sh.has_sm && sh.sm_crossings == 1 &&
               sh.x2 > 0.0;
    };
    if (!positive(b_lo) || positive(b_hi))
        throw std::invalid_argument("oracle: [b_lo, b_hi] does not bracket the class flip");
    while (b_hi - b_lo > tol_b) {
        const double mid = 0.5 * (b_lo + b_hi);
        (positive(mid) ? b_lo : b_hi) = mid;
    }
    return 0.5 * (b_lo + b_hi);
}

}  // namespace oracle
