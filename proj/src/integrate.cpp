#include "lsurf/integrate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lsurf/errors.hpp"

namespace lsurf {

namespace {

using Vec3 = std::array<double, 3>;  // {x, z, theta}

// Non-throwing right-hand side; invalid height yields NaN so the step
// controller rejects the step instead of aborting the trace.
inline Vec3 rhs_raw(double /*s*/, const Vec3& y, const Params& p) {
    if (!(y[1] > 0.0)) {
        const double nan = std::numeric_limits<double>::quiet_NaN();
        return {nan, nan, nan};
    }
    const double c = std::cos(y[2]);
    const double si = std::sin(y[2]);
    return {c, si, p.lambda + y[0] * si - (y[1] - (p.n - 1) / y[1]) * c};
}

inline bool finite(const Vec3& v) {
    return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
// 5th-order minus embedded 4th-order weights.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Dense-output weights.
constexpr double d1 = -12715105075.0 / 11282082432.0;
constexpr double d3 = 87487479700.0 / 32700410799.0;
constexpr double d4 = -10690763975.0 / 1880347072.0;
constexpr double d5 = 701980252875.0 / 199316789632.0;
constexpr double d6 = -1453857185.0 / 822651844.0;
constexpr double d7 = 69997945.0 / 29380423.0;

struct StageResult {
    Vec3 y1;
    Vec3 k1, k3, k4, k5, k6, k7;
    double err;  // scaled error norm; NaN when a stage left the domain
};

StageResult dopri_step(double s, const Vec3& y, double h, const Vec3& k1, const Params& p) {
    StageResult r;
    r.k1 = k1;
    Vec3 t;

    for (int i = 0; i < 3; ++i) t[i] = y[i] + h * a21 * k1[i];
    const Vec3 k2 = rhs_raw(s + h / 5.0, t, p);
    for (int i = 0; i < 3; ++i) t[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    r.k3 = rhs_raw(s + 3.0 * h / 10.0, t, p);
    for (int i = 0; i < 3; ++i) t[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * r.k3[i]);
    r.k4 = rhs_raw(s + 4.0 * h / 5.0, t, p);
    for (int i = 0; i < 3; ++i)
        t[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * r.k3[i] + a54 * r.k4[i]);
    r.k5 = rhs_raw(s + 8.0 * h / 9.0, t, p);
    for (int i = 0; i < 3; ++i)
        t[i] = y[i] +
               h * (a61 * k1[i] + a62 * k2[i] + a63 * r.k3[i] + a64 * r.k4[i] + a65 * r.k5[i]);
    r.k6 = rhs_raw(s + h, t, p);
    for (int i = 0; i < 3; ++i)
        r.y1[i] = y[i] + h * (a71 * k1[i] + a73 * r.k3[i] + a74 * r.k4[i] + a75 * r.k5[i] +
                              a76 * r.k6[i]);
    r.k7 = rhs_raw(s + h, r.y1, p);

    if (!finite(k2) || !finite(r.k3) || !finite(r.k4) || !finite(r.k5) || !finite(r.k6) ||
        !finite(r.y1) || !finite(r.k7)) {
        r.err = std::numeric_limits<double>::quiet_NaN();
        return r;
    }

    double acc = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double ei = h * (e1 * k1[i] + e3 * r.k3[i] + e4 * r.k4[i] + e5 * r.k5[i] +
                               e6 * r.k6[i] + e7 * r.k7[i]);
        const double sc = p.abs_tol + p.rel_tol * std::max(std::abs(y[i]), std::abs(r.y1[i]));
        acc += (ei / sc) * (ei / sc);
    }
    r.err = std::sqrt(acc / 3.0);
    return r;
}

DenseStep make_dense(double s, double h, const Vec3& y0, const StageResult& st) {
    DenseStep d;
    d.s0 = s;
    d.h = h;
    for (int i = 0; i < 3; ++i) {
        const double ydiff = st.y1[i] - y0[i];
        const double bspl = h * st.k1[i] - ydiff;
        d.c[0][i] = y0[i];
        d.c[1][i] = ydiff;
        d.c[2][i] = bspl;
        d.c[3][i] = ydiff - h * st.k7[i] - bspl;
        d.c[4][i] = h * (d1 * st.k1[i] + d3 * st.k3[i] + d4 * st.k4[i] + d5 * st.k5[i] +
                         d6 * st.k6[i] + d7 * st.k7[i]);
    }
    return d;
}

double initial_step(double s0, const Vec3& y0, const Vec3& f0, const Params& p) {
    double d0 = 0.0, d1n = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double sc = p.abs_tol + p.rel_tol * std::abs(y0[i]);
        d0 += (y0[i] / sc) * (y0[i] / sc);
        d1n += (f0[i] / sc) * (f0[i] / sc);
    }
    d0 = std::sqrt(d0 / 3.0);
    d1n = std::sqrt(d1n / 3.0);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, p.max_step);

    // One explicit Euler probe to estimate the second derivative scale.
    Vec3 y1;
    for (int i = 0; i < 3; ++i) y1[i] = y0[i] + h0 * f0[i];
    const Vec3 f1 = rhs_raw(s0 + h0, y1, p);
    if (!finite(f1)) return std::max(1e-10, h0 * 1e-3);
    double d2 = 0.0;
    for (int i = 0; i < 3; ++i) {
        const double sc = p.abs_tol + p.rel_tol * std::abs(y0[i]);
        d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
    }
    d2 = std::sqrt(d2 / 3.0) / h0;
    const double dm = std::max(d1n, d2);
    const double h1 = (dm <= 1e-15) ? std::max(1e-6, h0 * 1e-3)
                                    : std::pow(0.01 / dm, 0.2);
    return std::min({100.0 * h0, h1, p.max_step});
}

struct RootCandidate {
    double s;
    EventKind kind;
    double theta_target;
    bool terminal;
    StopReason reason;  // meaningful for terminal candidates
};

// Bisect g on the dense interpolant of one step. g(sa) and g(sb) must have
// opposite signs (or g(sb) == 0).
template <typename G>
double bisect_root(G&& g, double sa, double sb, double tol) {
    double ga = g(sa);
    if (ga == 0.0) return sa;
    for (int it = 0; it < 200 && (sb - sa) > tol; ++it) {
        const double mid = 0.5 * (sa + sb);
        const double gm = g(mid);
        if (gm == 0.0) return mid;
        if ((ga > 0.0) != (gm > 0.0)) {
            sb = mid;
        } else {
            sa = mid;
            ga = gm;
        }
    }
    return 0.5 * (sa + sb);
}

}  // namespace

IntegrateResult integrate(const CurveState& start, const Params& p, const EventSpec& spec) {
    p.validate();
    IntegrateResult res;
    DenseBranch& br = res.branch;
    br.kind = BranchKind::First;
    br.states.push_back(start);

    Vec3 y{start.x, start.z, start.theta};
    double s = start.s;
    Vec3 k1 = rhs_raw(s, y, p);
    if (!finite(k1)) throw AxisSingularityError("integrate: start state has z <= 0");

    const double z_floor = p.axis_eps;
    double h = initial_step(s, y, k1, p);
    bool just_rejected = false;
    std::size_t consecutive_rejects = 0;

    auto state_at = [&](const DenseStep& d, double sv) {
        const double t = std::clamp((sv - d.s0) / d.h, 0.0, 1.0);
        const double t1 = 1.0 - t;
        CurveState cs;
        cs.s = sv;
        double vals[3];
        for (int i = 0; i < 3; ++i)
            vals[i] = d.c[0][i] +
                      t * (d.c[1][i] + t1 * (d.c[2][i] + t * (d.c[3][i] + t1 * d.c[4][i])));
        cs.x = vals[0];
        cs.z = vals[1];
        cs.theta = vals[2];
        return cs;
    };

    for (;;) {
        if (s >= p.s_max - 1e-14) {
            res.reason = StopReason::SBudget;
            return res;
        }
        if (res.steps_accepted + res.steps_rejected > 5'000'000) {
            res.reason = StopReason::SBudget;
            return res;
        }

        double h_try = std::min(h, p.s_max - s);
        bool capped_at_stop = false;
        if (spec.stop_at_s && s + h_try >= *spec.stop_at_s - 1e-14) {
            h_try = *spec.stop_at_s - s;
            capped_at_stop = true;
            if (h_try <= 0.0) {
                res.reason = StopReason::SStop;
                return res;
            }
        }
        if (h_try < 1e-14 * std::max(1.0, std::abs(s))) {
            res.reason = StopReason::StepSizeUnderflow;
            return res;
        }

        const StageResult st = dopri_step(s, y, h_try, k1, p);
        if (!(st.err <= 1.0)) {  // rejection; also catches NaN
            ++res.steps_rejected;
            if (++consecutive_rejects > 200) {
                res.reason = StopReason::StepSizeUnderflow;
                return res;
            }
            const double fac = std::isnan(st.err)
                                   ? 0.25
                                   : std::max(0.2, 0.9 * std::pow(st.err, -0.2));
            h = h_try * std::min(fac, 1.0);
            just_rejected = true;
            continue;
        }
        consecutive_rejects = 0;

        const DenseStep dense = make_dense(s, h_try, y, st);
        const double s_next = s + h_try;

        // Collect event roots inside this step.
        std::vector<RootCandidate> roots;
        const bool first_step = res.steps_accepted == 0;
        auto scan = [&](auto&& g, EventKind kind, double target, bool terminal,
                        StopReason reason) {
            const double g0 = g(s);
            const double g1 = g(s_next);
            if (g0 == 0.0 && g1 == 0.0) return;           // sliding along the locus
            if (g0 == 0.0 && first_step) return;          // launched on the boundary
            double root;
            if (g0 == 0.0) {
                root = s;
            } else if (g1 == 0.0) {
                root = s_next;
            } else if ((g0 > 0.0) != (g1 > 0.0)) {
                root = bisect_root(g, s, s_next, p.event_tol_s);
            } else {
                return;
            }
            roots.push_back({root, kind, target, terminal, reason});
        };

        for (const ThetaWatch& w : spec.theta_watches) {
            scan([&](double sv) { return state_at(dense, sv).theta - w.target; }, w.kind,
                 w.target, w.terminal, StopReason::ThetaTarget);
        }
        if (spec.record_z_axis_crossings) {
            scan([&](double sv) { return state_at(dense, sv).x; }, EventKind::ZAxisCrossing,
                 0.0, false, StopReason::ThetaTarget);
        }
        if (spec.stop_below_axis) {
            scan([&](double sv) { return state_at(dense, sv).z - z_floor; },
                 EventKind::XAxisApproach, 0.0, true, StopReason::AxisApproach);
        }
        scan([&](double sv) { return state_at(dense, sv).z - p.z_ceiling; },
             EventKind::XAxisApproach, 0.0, true, StopReason::ZCeiling);

        std::sort(roots.begin(), roots.end(),
                  [](const RootCandidate& a, const RootCandidate& b) { return a.s < b.s; });

        const RootCandidate* stop = nullptr;
        for (const RootCandidate& rc : roots) {
            if (rc.terminal) {
                stop = &rc;
                break;
            }
        }

        br.steps.push_back(dense);
        ++res.steps_accepted;

        for (const RootCandidate& rc : roots) {
            if (stop && rc.s > stop->s) break;
            if (rc.terminal && &rc != stop) continue;
            if (!rc.terminal) {
                // Roots landing exactly on a node would be seen by both
                // adjoining steps; drop the duplicate.
                if (!br.events.empty() && br.events.back().kind == rc.kind &&
                    std::abs(br.events.back().state.s - rc.s) <
                        std::max(10.0 * p.event_tol_s, 1e-10))
                    continue;
                Event ev{rc.kind, state_at(dense, rc.s), rc.theta_target};
                br.events.push_back(ev);
            }
        }

        if (stop) {
            const CurveState end_state = state_at(dense, stop->s);
            br.states.push_back(end_state);
            res.reason = stop->reason;
            if (stop->reason != StopReason::ZCeiling) {
                Event ev{stop->kind, end_state, stop->theta_target};
                br.events.push_back(ev);
                res.terminal = ev;
            }
            return res;
        }

        CurveState node;
        node.s = s_next;
        node.x = st.y1[0];
        node.z = st.y1[1];
        node.theta = st.y1[2];
        br.states.push_back(node);

        if (capped_at_stop) {
            res.reason = StopReason::SStop;
            return res;
        }

        s = s_next;
        y = st.y1;
        k1 = st.k7;  // FSAL

        const double fac = 0.9 * std::pow(std::max(st.err, 1e-10), -0.2);
        const double facmax = just_rejected ? 1.0 : 5.0;
        h = h_try * std::clamp(fac, 0.2, facmax);
        h = std::min(h, p.max_step);
        just_rejected = false;
    }
}

}  // namespace lsurf
