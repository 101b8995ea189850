#include "lsurf/shooting.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

#include "lsurf/errors.hpp"
#include "lsurf/ode.hpp"

namespace lsurf {

namespace {
constexpr double kPi = 3.14159265358979323846;
// Sentinel target on the second branch: theta falling back below pi means the
// trajectory left the expected corridor.
constexpr double kRetreatTarget = kPi - 1e-9;
}  // namespace

const char* to_string(TerminalClass c) {
    switch (c) {
        case TerminalClass::SecondVerticalTangent: return "second_vertical_tangent";
        case TerminalClass::AxisHit: return "axis_hit";
        case TerminalClass::Diverged: return "diverged";
        case TerminalClass::Anomalous: return "anomalous";
    }
    return "unknown";
}

FirstBranchResult trace_first_branch(double b, const Params& p) {
    const CurveState start = axis_series_start(b, p);
    EventSpec spec;
    spec.theta_watches.push_back({kPi, EventKind::VerticalTangent, true});
    spec.record_z_axis_crossings = true;
    spec.stop_below_axis = true;

    IntegrateResult r = integrate(start, p, spec);
    FirstBranchResult out;
    out.branch = std::move(r.branch);
    out.branch.kind = BranchKind::First;
    out.reason = r.reason;
    if (r.reason == StopReason::ThetaTarget) out.s1 = r.terminal;
    return out;
}

SecondBranchResult trace_second_branch(const Event& s1, const Params& p) {
    EventSpec spec;
    spec.theta_watches.push_back({2.0 * kPi, EventKind::VerticalTangent, true});
    spec.theta_watches.push_back({1.5 * kPi, EventKind::HorizontalTangent, false});
    spec.theta_watches.push_back({kRetreatTarget, EventKind::VerticalTangent, true});
    spec.record_z_axis_crossings = true;
    spec.stop_below_axis = true;

    IntegrateResult r = integrate(s1.state, p, spec);
    SecondBranchResult out;
    out.branch = std::move(r.branch);
    out.branch.kind = BranchKind::Second;
    out.reason = r.reason;
    for (const Event& ev : out.branch.events)
        if (ev.kind == EventKind::HorizontalTangent) out.horizontal_tangents.push_back(ev);

    if (r.reason == StopReason::ThetaTarget && r.terminal &&
        r.terminal->theta_target == 2.0 * kPi) {
        out.s2 = r.terminal;
    } else if (r.reason == StopReason::AxisApproach && r.terminal) {
        const CurveState& st = r.terminal->state;
        const double si = std::sin(st.theta);
        // Follow the tangent line down to z = 0.
        out.x_at_axis = (std::abs(si) > 1e-6) ? st.x - st.z * std::cos(st.theta) / si : st.x;
    }
    return out;
}

ShotReport shoot(double b, const Params& p) {
    p.validate();
    if (!(b > 0.0)) throw Error("shoot: b must be > 0");

    ShotReport rep;
    rep.b = b;
    rep.regime_warning = !b_in_regime(b, p);

    FirstBranchResult fb = trace_first_branch(b, p);
    rep.first = std::move(fb.branch);
    for (const Event& ev : rep.first.events)
        if (ev.kind == EventKind::ZAxisCrossing) rep.z_axis_crossings.push_back(ev);

    if (fb.reason != StopReason::ThetaTarget) {
        switch (fb.reason) {
            case StopReason::ZCeiling: rep.terminal = TerminalClass::Diverged; break;
            case StopReason::AxisApproach:
                rep.terminal = TerminalClass::Anomalous;
                rep.anomaly = "first branch returned to the axis";
                break;
            default:
                rep.terminal = TerminalClass::Anomalous;
                rep.anomaly = std::string("first branch stopped: ") + to_string(fb.reason);
        }
        return rep;
    }
    rep.s1 = fb.s1;

    if (!(rep.s1->state.z > p.cylinder_radius() - 1e-9)) {
        rep.terminal = TerminalClass::Anomalous;
        rep.anomaly = "first vertical tangent below the cylinder radius";
        return rep;
    }

    SecondBranchResult sb = trace_second_branch(*rep.s1, p);
    rep.second = std::move(sb.branch);
    for (const Event& ev : rep.second->events)
        if (ev.kind == EventKind::ZAxisCrossing) rep.z_axis_crossings.push_back(ev);

    if (sb.horizontal_tangents.size() > 1) {
        rep.terminal = TerminalClass::Anomalous;
        rep.anomaly = "multiple horizontal tangents on the second branch";
        return rep;
    }
    if (!sb.horizontal_tangents.empty()) rep.sm = sb.horizontal_tangents.front();

    if (sb.s2) {
        if (!rep.sm) {
            rep.terminal = TerminalClass::Anomalous;
            rep.anomaly = "second vertical tangent without a horizontal tangent";
            return rep;
        }
        rep.s2 = sb.s2;
        rep.terminal = TerminalClass::SecondVerticalTangent;
        return rep;
    }
    switch (sb.reason) {
        case StopReason::AxisApproach:
            rep.terminal = TerminalClass::AxisHit;
            rep.x_at_axis = sb.x_at_axis;
            break;
        case StopReason::ZCeiling: rep.terminal = TerminalClass::Diverged; break;
        case StopReason::ThetaTarget:
            rep.terminal = TerminalClass::Anomalous;
            rep.anomaly = "theta retreated below pi on the second branch";
            break;
        default:
            rep.terminal = TerminalClass::Anomalous;
            rep.anomaly = std::string("second branch stopped: ") + to_string(sb.reason);
    }
    return rep;
}

double default_b_min(const Params& p) {
    return std::max(1e-3, -(4.0 * p.n + 2.0) * p.lambda);
}

namespace {

std::vector<GridPoint> scan_classes(const Params& p, double b_min, double b_max,
                                    std::size_t grid) {
    std::vector<GridPoint> scan;
    scan.reserve(grid);
    const double ratio = std::log(b_max / b_min);
    for (std::size_t i = 0; i < grid; ++i) {
        const double f = static_cast<double>(i) / static_cast<double>(grid - 1);
        const double b = b_min * std::exp(ratio * f);
        ShotReport rep = shoot(b, p);
        scan.push_back({b, rep.terminal, rep.positive(), rep.shoot_value()});
    }
    return scan;
}

std::string class_table(const std::vector<GridPoint>& scan) {
    std::ostringstream os;
    for (const GridPoint& g : scan)
        os << " (" << g.b << ", " << to_string(g.cls) << (g.positive ? "+" : "-") << ")";
    return os.str();
}

// Pick the Positive -> non-Positive adjacency to bisect. Below the height
// regime bound the classification is not reliable (anomalous and diverged
// shots interleave with positive ones), so a flip only counts as clean when
// the non-positive side is a genuine rejection: x(s2) <= 0 or an axis hit.
// Preference order: lowest clean flip whose positive side is in regime, then
// the highest clean flip, then the lowest flip of any kind.
std::optional<Bracket> bracket_from_scan(std::vector<GridPoint> scan, const Params& p) {
    Bracket br;
    br.scan = std::move(scan);
    std::optional<std::size_t> in_regime_clean, highest_clean, lowest_any;
    for (std::size_t i = 0; i + 1 < br.scan.size(); ++i) {
        if (!(br.scan[i].positive && !br.scan[i + 1].positive)) continue;
        ++br.flip_count;
        if (!lowest_any) lowest_any = i;
        const GridPoint& hi = br.scan[i + 1];
        const bool clean = hi.cls == TerminalClass::AxisHit ||
                           (hi.shoot_value.has_value() && *hi.shoot_value <= 0.0);
        if (!clean) continue;
        highest_clean = i;
        if (!in_regime_clean && b_in_regime(br.scan[i].b, p)) in_regime_clean = i;
    }
    const auto pick = in_regime_clean ? in_regime_clean
                      : highest_clean ? highest_clean
                                      : lowest_any;
    if (!pick) return std::nullopt;
    br.b_lo = br.scan[*pick].b;
    br.b_hi = br.scan[*pick + 1].b;
    return br;
}

}  // namespace

Bracket bracket_scan(const Params& p, double b_min, double b_max, std::size_t grid) {
    p.validate();
    if (!(b_min > 0.0) || !(b_max > b_min)) throw Error("bracket_scan: need 0 < b_min < b_max");
    if (grid < 2) throw Error("bracket_scan: need at least two grid points");

    auto scan = scan_classes(p, b_min, b_max, grid);
    auto br = bracket_from_scan(scan, p);
    if (!br) {
        std::ostringstream os;
        os << "bracket_scan: classification never flips on [" << b_min << ", " << b_max
           << "]; classes:" << class_table(scan);
        throw NoBracketError(os.str());
    }
    return *br;
}

FindResult find_critical_height(const Params& p, double b_min, double b_max, std::size_t grid,
                                double tol_b, double tol_F) {
    p.validate();
    if (b_min <= 0.0) b_min = default_b_min(p);
    if (b_max <= 0.0) b_max = p.sphere_radius();
    if (!(b_min < b_max)) throw Error("find_critical_height: need b_min < b_max");
    if (grid < 2) throw Error("find_critical_height: need at least two grid points");

    FindResult fr;
    for (;;) {
        auto scan = scan_classes(p, b_min, b_max, grid);
        if (auto br = bracket_from_scan(scan, p)) {
            fr.bracket = std::move(*br);
            fr.b_min_used = b_min;
            fr.b_max_used = b_max;
            break;
        }
        const bool any_positive =
            std::any_of(scan.begin(), scan.end(), [](const GridPoint& g) { return g.positive; });
        if (!any_positive && b_min > 1e-6) {
            // Whole window classifies non-Positive: b0 lies below it.
            b_max = b_min;
            b_min = std::max(1e-6, b_min / 16.0);
            ++fr.window_slides;
            continue;
        }
        if (any_positive && b_max < p.sphere_radius()) {
            b_min = b_max;
            b_max = p.sphere_radius();
            ++fr.window_slides;
            continue;
        }
        throw NoBracketError("find_critical_height: classification never flips on [" +
                             std::to_string(b_min) + ", " + std::to_string(b_max) +
                             "] after " + std::to_string(fr.window_slides) +
                             " window moves; classes:" + class_table(scan));
    }

    fr.bisect = bisect_b0(p, fr.bracket, tol_b, tol_F);
    fr.profile = close_profile(fr.bisect.shot, p, tol_F);
    return fr;
}

BisectResult bisect_b0(const Params& p, const Bracket& bracket, double tol_b, double tol_F) {
    BisectResult out;
    double lo = bracket.b_lo, hi = bracket.b_hi;
    if (!(hi >= lo)) throw Error("bisect_b0: invalid bracket");

    if (hi == lo) {
        out.b0 = lo;
        out.shot = shoot(lo, p);
        out.bracket_width = 0.0;
        return out;
    }

    auto finish = [&](double b, ShotReport&& rep) {
        out.b0 = b;
        out.shot = std::move(rep);
        out.bracket_width = hi - lo;
        return out;
    };

    for (int it = 0; it < 256 && (hi - lo) > tol_b; ++it) {
        const double mid = 0.5 * (lo + hi);
        ShotReport rep = shoot(mid, p);
        ++out.iterations;
        out.history.push_back({mid, rep.terminal, rep.positive(), rep.shoot_value()});
        if (rep.terminal == TerminalClass::Anomalous)
            throw ClassFlipAnomalyError("bisect_b0: anomalous shot at b=" + std::to_string(mid) +
                                        ": " + rep.anomaly);
        const auto F = rep.shoot_value();
        if (F && std::abs(*F) <= tol_F) return finish(mid, std::move(rep));
        if (rep.positive())
            lo = mid;
        else
            hi = mid;
    }

    // Bracket width converged before |F| did; the Positive side is the
    // closest admissible shot.
    ShotReport rep = shoot(lo, p);
    const auto F = rep.shoot_value();
    if (F && std::abs(*F) <= tol_F) return finish(lo, std::move(rep));
    throw Error("bisect_b0: converged bracket but |x(s2)| stayed above tol_F");
}

ProfilePoint ClosedProfile::sample(double t) const {
    const double total = 2.0 * s_half;
    t = std::clamp(t, 0.0, total);
    const bool mirrored = t > s_half;
    const double u = mirrored ? total - t : t;

    CurveState st;
    const double s_launch = shot.first.s_begin();
    if (u <= s_launch) {
        const double k = (b0 + params.lambda) / params.n;
        st.s = u;
        st.x = b0 - 0.5 * k * u * u;
        st.z = u;
        st.theta = kPi / 2.0 + k * u;
    } else if (u <= shot.s1->state.s) {
        st = shot.first.eval(u);
    } else {
        st = shot.second->eval(u);
    }

    ProfilePoint pt;
    pt.t = t;
    if (u == s_half) st.x = 0.0;  // junction snap
    if (mirrored) {
        pt.x = -st.x;
        pt.z = st.z;
        pt.theta = 4.0 * kPi - st.theta;
    } else {
        pt.x = st.x;
        pt.z = st.z;
        pt.theta = st.theta;
    }
    return pt;
}

std::vector<ProfilePoint> resample_profile(const ClosedProfile& profile, double h) {
    if (!(h > 0.0)) throw Error("resample_profile: need h > 0");
    const double s1 = profile.shot.s1->state.s;
    const double sh = profile.s_half;
    const double anchors[5] = {0.0, s1, sh, 2.0 * sh - s1, 2.0 * sh};

    std::vector<ProfilePoint> pts;
    for (int a = 0; a + 1 < 5; ++a) {
        const double ta = anchors[a], tb = anchors[a + 1];
        // Power-of-two counts per segment make the h/2 grid a superset of the
        // h grid, so successive refinements interleave instead of drifting.
        const auto n = std::bit_ceil(
            static_cast<std::size_t>(std::max(1.0, std::ceil((tb - ta) / h))));
        for (std::size_t k = 0; k < n; ++k)
            pts.push_back(profile.sample(ta + (tb - ta) * static_cast<double>(k) /
                                                  static_cast<double>(n)));
    }
    pts.push_back(profile.sample(2.0 * sh));
    return pts;
}

ClosedProfile close_profile(const ShotReport& shot, const Params& p, double tol_F) {
    if (shot.terminal != TerminalClass::SecondVerticalTangent || !shot.s2)
        throw JunctionMismatchError("close_profile: shot does not end at a second vertical tangent");
    if (std::abs(shot.s2->state.x) > tol_F)
        throw JunctionMismatchError("close_profile: |x(s2)| = " +
                                    std::to_string(std::abs(shot.s2->state.x)) +
                                    " exceeds tolerance");
    ClosedProfile prof;
    prof.b0 = shot.b;
    prof.params = p;
    prof.shot = shot;
    prof.s_half = shot.s2->state.s;
    prof.full = resample_profile(prof, 1e-3);
    return prof;
}

}  // namespace lsurf
