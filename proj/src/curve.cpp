#include "lsurf/curve.hpp"

#include <algorithm>
#include <cmath>

#include "lsurf/errors.hpp"

namespace lsurf {

CurveState DenseBranch::eval(double s) const {
    if (states.empty()) throw Error("DenseBranch::eval: empty branch");
    const double lo = s_begin(), hi = s_end();
    s = std::clamp(s, lo, hi);

    if (kind == BranchKind::Analytic) {
        if (!analytic) throw Error("DenseBranch::eval: analytic branch without rule");
        return analytic(s);
    }
    if (steps.empty()) throw Error("DenseBranch::eval: no dense steps");

    // Find the step whose interval contains s.
    auto it = std::upper_bound(steps.begin(), steps.end(), s,
                               [](double v, const DenseStep& st) { return v < st.s0; });
    if (it != steps.begin()) --it;
    const DenseStep& st = *it;
    const double t = std::clamp((s - st.s0) / st.h, 0.0, 1.0);
    const double t1 = 1.0 - t;

    CurveState out;
    out.s = s;
    double vals[3];
    for (int i = 0; i < 3; ++i) {
        vals[i] = st.c[0][i] +
                  t * (st.c[1][i] + t1 * (st.c[2][i] + t * (st.c[3][i] + t1 * st.c[4][i])));
    }
    out.x = vals[0];
    out.z = vals[1];
    out.theta = vals[2];
    return out;
}

DenseBranch analytic_branch(std::function<CurveState(double)> rule, double s0, double s1,
                            std::size_t nodes) {
    if (!(s1 > s0)) throw Error("analytic_branch: need s1 > s0");
    if (nodes < 2) nodes = 2;
    DenseBranch br;
    br.kind = BranchKind::Analytic;
    br.analytic = std::move(rule);
    br.states.reserve(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double s = s0 + (s1 - s0) * static_cast<double>(i) / static_cast<double>(nodes - 1);
        br.states.push_back(br.analytic(s));
    }
    return br;
}

}  // namespace lsurf
