#include "nlps/studies.hpp"

#include <cmath>
#include <string>

namespace nlps {

Field restrict_half(const Field& fine) {
    const int nf = fine.spec.n;
    if (nf % 2 != 0) throw ConfigError("restrict_half requires an even grid size");
    const GridSpec coarse = make_grid(nf / 2, fine.spec.length);
    Field out(coarse);
    for (int j = 0; j < coarse.n; ++j) {
        for (int i = 0; i < coarse.n; ++i) {
            out.at(i, j) = 0.25 * (fine.at(2 * i, 2 * j) + fine.at(2 * i + 1, 2 * j) +
                                   fine.at(2 * i, 2 * j + 1) + fine.at(2 * i + 1, 2 * j + 1));
        }
    }
    return out;
}

namespace {

double l2_diff(const Field& a, const Field& b) {
    double sum = 0.0, comp = 0.0;
    const std::size_t n2 = a.size();
    for (std::size_t k = 0; k < n2; ++k) {
        const double d = a.data[k] - b.data[k];
        const double y = d * d - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return std::sqrt(a.spec.cell_area * sum);
}

}  // namespace

RefineReport refine_study(const RunConfig& base, int levels) {
    if (levels < 2) throw ConfigError("refine-study requires at least 2 levels");
    if (base.init.type != InitType::Sinusoid) {
        throw ConfigError("refine-study requires init.type \"sinusoid\" "
                          "(the initial condition must be resolution-independent)");
    }

    // Resolve dt on the coarsest grid, then scale by dx^2.
    double dt0;
    {
        const KernelGrids kg = sample_kernel_grids(make_bump_kernel(base.kernel_radius), base.grid);
        dt0 = base.time.dt.value_or(auto_dt(base.grid, base.physics, kg));
    }

    RefineReport report;
    std::vector<State> finals;
    for (int level = 0; level < levels; ++level) {
        RunConfig cfg = base;
        cfg.grid = make_grid(base.grid.n << level, base.grid.length);
        cfg.time.dt = dt0 / std::pow(4.0, level);
        SimulateOptions opt;
        opt.write_outputs = false;
        finals.push_back(simulate(cfg, opt).final_state);
        report.ns.push_back(cfg.grid.n);
        report.dts.push_back(*cfg.time.dt);
    }

    for (int level = 0; level + 1 < levels; ++level) {
        report.diff_m.push_back(l2_diff(restrict_half(finals[level + 1].m), finals[level].m));
        report.diff_phi.push_back(l2_diff(restrict_half(finals[level + 1].phi), finals[level].phi));
    }
    for (std::size_t k = 0; k + 1 < report.diff_m.size(); ++k) {
        report.order_m.push_back(std::log2(report.diff_m[k] / report.diff_m[k + 1]));
        report.order_phi.push_back(std::log2(report.diff_phi[k] / report.diff_phi[k + 1]));
    }
    return report;
}

PicardStudyReport picard_study(const RunConfig& cfg, long steps) {
    if (steps < 1) throw ConfigError("picard-study requires at least 1 step");

    const KernelGrids kg = sample_kernel_grids(make_bump_kernel(cfg.kernel_radius), cfg.grid);
    const ConvolutionPlan plan(kg);
    const double dt = cfg.time.dt.value_or(auto_dt(cfg.grid, cfg.physics, kg));
    const double tol = default_picard_tol(cfg.grid);

    State state = make_initial_state(cfg);

    PicardStudyReport report;
    report.dt = dt;
    double log_ratio_sum = 0.0;
    long ratio_count = 0;

    for (long k = 0; k < steps; ++k) {
        const State explicit_next = step_explicit(state, cfg.physics, dt, plan);
        auto [wv_next, picard] = picard_time_step(to_wv(state), dt, cfg.physics, plan, tol);
        State picard_next = from_wv(wv_next);

        PicardStudyStep row;
        row.step = picard_next.step;
        row.time = picard_next.time;
        row.iterates = picard.iterates_used;
        row.converged = picard.converged;
        row.first_residual = picard.residuals.empty() ? 0.0 : picard.residuals.front();
        row.last_residual = picard.residuals.empty() ? 0.0 : picard.residuals.back();

        double step_log_sum = 0.0;
        long step_ratios = 0;
        for (std::size_t r = 0; r + 1 < picard.residuals.size(); ++r) {
            if (picard.residuals[r] > 0.0 && picard.residuals[r + 1] > 0.0) {
                const double ratio = picard.residuals[r + 1] / picard.residuals[r];
                step_log_sum += std::log(ratio);
                ++step_ratios;
            }
        }
        if (step_ratios > 0) {
            row.mean_ratio = std::exp(step_log_sum / static_cast<double>(step_ratios));
            log_ratio_sum += step_log_sum;
            ratio_count += step_ratios;
        }

        double max_diff = 0.0;
        const std::size_t n2 = state.m.size();
        for (std::size_t c = 0; c < n2; ++c) {
            max_diff = std::max(max_diff,
                                std::fabs(explicit_next.m.data[c] - picard_next.m.data[c]));
            max_diff = std::max(max_diff,
                                std::fabs(explicit_next.phi.data[c] - picard_next.phi.data[c]));
        }
        row.crosscheck = max_diff;

        report.max_crosscheck = std::max(report.max_crosscheck, max_diff);
        report.all_converged = report.all_converged && picard.converged;
        report.steps.push_back(row);

        state = std::move(picard_next);
    }

    if (ratio_count > 0) {
        report.geometric_mean_ratio = std::exp(log_ratio_sum / static_cast<double>(ratio_count));
    }
    return report;
}

}  // namespace nlps
