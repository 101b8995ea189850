#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lsurf/shooting.hpp"

namespace lsurf {

// Outcome of one inequality check. margin > 0 iff passed; the declared slack
// (1e-6 unless the check states otherwise) is already absorbed into margin.
// skipped means the hypothesis gate did not apply; a skipped check is not a
// pass.
struct CheckResult {
    std::string check_id;
    std::string statement;  // the inequality being checked, plain notation
    double b = 0.0;
    int n = 2;
    double lambda = 0.0;
    bool passed = false;
    bool skipped = false;
    double margin = 0.0;
    std::string detail;
};

inline constexpr double kCheckSlack = 1e-6;

// First-branch checks: sign of theta', height of the first vertical tangent,
// boundedness, and the quantitative bounds tied to the launch height.
std::vector<CheckResult> check_first_branch(const ShotReport& shot, const Params& p,
                                            std::size_t samples = 1000);

// Small-height regime checks (ids lemma_3_5 ... lemma_3_9). Hypothesis gates
// are evaluated in log space where the thresholds underflow; out-of-regime
// inputs come back skipped with the gate diagnostics in detail.
std::vector<CheckResult> check_small_b_lemmas(const ShotReport& shot, const Params& p,
                                              std::size_t samples = 1000);

// Second-branch checks (ids lemma_4_1 ... lemma_4_9).
std::vector<CheckResult> check_second_branch(const ShotReport& shot, const Params& p,
                                             std::size_t samples = 1000);

// Checks specific to the converged critical-height profile.
std::vector<CheckResult> check_b0(const ClosedProfile& profile, const Params& p,
                                  double tol_F = 1e-9);

// All per-shot checks in order.
std::vector<CheckResult> run_all_checks(const ShotReport& shot, const Params& p,
                                        std::size_t samples = 1000);

struct Crossing {
    double x = 0.0;
    double z = 0.0;
    double t_a = 0.0;  // arc parameters of the two strands
    double t_b = 0.0;
    double angle = 0.0;  // angle between the strand tangents, in (0, pi)
};

struct IntersectionReport {
    std::size_t count = 0;           // transversal self-intersections
    std::vector<Crossing> crossings;
    std::vector<Crossing> mirror_artifacts;  // on-axis doubles created by the reflection
};

// Exact segment-pair crossing count over the resampled closed profile,
// excluding adjacent segments and the on-axis mirror artifacts; crossings are
// refined on the dense representation. Throws DegenerateCrossingError for
// collinear overlaps.
IntersectionReport count_self_intersections(const ClosedProfile& profile);
IntersectionReport count_self_intersections(const ClosedProfile& profile,
                                            const std::vector<ProfilePoint>& pts);

// Max |equation residual| along a branch with finite-difference theta'
// (central differences at arc offset h_fd).
struct ResidualScan {
    double max_residual = 0.0;
    std::size_t samples = 0;
};
ResidualScan residual_along(const DenseBranch& branch, const Params& p,
                            std::size_t samples = 1000, double h_fd = 1e-5);

}  // namespace lsurf
