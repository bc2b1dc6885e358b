#pragma once

#include <optional>
#include <vector>

#include "nlps/simulate.hpp"
#include "nlps/wv_solver.hpp"

namespace nlps {

/// Self-convergence harness: runs the configured problem at n, 2n, 4n, ...
/// with dt scaled by 1/4 per level (dt proportional to dx^2), restricts each
/// finer solution to the next coarser grid by 2x2 cell averaging and reports
/// successive-difference L2 norms and observed orders log2(d_k / d_{k+1}).
/// Requires the resolution-independent sinusoid initial condition.
struct RefineReport {
    std::vector<int> ns;
    std::vector<double> dts;
    std::vector<double> diff_m;    // levels-1 entries
    std::vector<double> diff_phi;
    std::vector<double> order_m;   // levels-2 entries
    std::vector<double> order_phi;
};

RefineReport refine_study(const RunConfig& base, int levels);

/// 2x2 cell averaging onto the half-resolution grid.
Field restrict_half(const Field& fine);

struct PicardStudyStep {
    long step = 0;
    double time = 0.0;
    int iterates = 0;
    bool converged = false;
    double first_residual = 0.0;
    double last_residual = 0.0;
    std::optional<double> mean_ratio;  // geometric mean of r_{k+1}/r_k within the step
    double crosscheck = 0.0;           // max-norm gap to the explicit step
};

struct PicardStudyReport {
    std::vector<PicardStudyStep> steps;
    std::optional<double> geometric_mean_ratio;  // over all residual ratios of the run
    double max_crosscheck = 0.0;
    bool all_converged = true;
    double dt = 0.0;
};

/// Advances the configured problem with picard_time_step for the given number
/// of steps, recording per-step iterate counts, residual contraction ratios
/// and the gap to the explicit scheme.
PicardStudyReport picard_study(const RunConfig& cfg, long steps);

}  // namespace nlps
