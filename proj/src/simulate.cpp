#include "nlps/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace nlps {

namespace {

std::string snapshot_name(long step) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "snapshot_%08ld.nlps", step);
    return buf;
}

double evaporation_total(const Field& phi, const EvaporationModel& model) {
    double sum = 0.0, comp = 0.0;
    for (double p : phi.data) {
        const double y = evaporation_rate(model, p) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return phi.spec.cell_area * sum;
}

}  // namespace

RunArtifacts simulate(const RunConfig& cfg, const SimulateOptions& opt) {
    const KernelSpec ks = make_bump_kernel(cfg.kernel_radius);
    const KernelGrids kg = sample_kernel_grids(ks, cfg.grid);
    const ConvolutionPlan plan(kg);

    RunSummary summary;
    summary.auto_dt_value = auto_dt(cfg.grid, cfg.physics, kg);
    const double dt = cfg.time.dt.value_or(summary.auto_dt_value);
    summary.dt = dt;
    summary.dt_exceeds_auto = cfg.time.dt.has_value() && *cfg.time.dt > summary.auto_dt_value;

    State state = make_initial_state(cfg);
    const State initial = state;

    const std::filesystem::path out_dir = opt.out_dir.value_or(cfg.output_dir);
    std::filesystem::path csv_path;
    if (opt.write_outputs) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) throw IoError("cannot create output directory: " + out_dir.string());
        csv_path = out_dir / "diagnostics.csv";
        std::filesystem::remove(csv_path, ec);
        render_ppm(state.m, Palette::Spin, out_dir / "m_start.ppm");
        render_ppm(state.phi, Palette::Concentration, out_dir / "phi_start.ppm");
    }

    const auto emit_row = [&](const State& s) {
        const DiagnosticsRow row = collect_diagnostics(s, initial, plan, cfg.physics);
        if (opt.on_row) opt.on_row(row);
        if (opt.write_outputs) append_diagnostics_row(row, csv_path);
    };
    const auto emit_snapshot = [&](const State& s) {
        if (opt.on_snapshot) opt.on_snapshot(s);
        if (opt.write_outputs) write_snapshot(s, out_dir / snapshot_name(s.step));
    };

    emit_row(state);
    emit_snapshot(state);
    long last_row_step = 0;
    long last_snapshot_step = 0;

    // First step count with steps*dt >= t_end. The 1e-9 relative slack keeps
    // a t_end that is an exact multiple of dt at exactly t_end/dt steps
    // instead of picking up a spurious extra step from accumulation noise.
    const long total_steps =
        cfg.time.t_end > 0.0 ? static_cast<long>(std::ceil(cfg.time.t_end / dt - 1e-9)) : 0;

    while (state.step < total_steps) {
        const double mass_m_prev = mass(state.m);
        const double mass_phi_prev = mass(state.phi);
        const double source_prev = evaporation_total(state.phi, cfg.physics.evap);

        State next = step_explicit(state, cfg.physics, dt, plan);

        const double res_m = std::fabs(mass(next.m) - mass_m_prev);
        const double res_phi = std::fabs(mass(next.phi) - mass_phi_prev - dt * source_prev);
        summary.max_mass_residual_m = std::max(summary.max_mass_residual_m, res_m);
        summary.max_mass_residual_phi = std::max(summary.max_mass_residual_phi, res_phi);

        const BoundViolations v = bound_violations(next);
        summary.max_viol_m_phi = std::max(summary.max_viol_m_phi, v.m_phi);
        summary.max_viol_phi_hi = std::max(summary.max_viol_phi_hi, v.phi_hi);
        summary.max_viol_phi_lo = std::max(summary.max_viol_phi_lo, v.phi_lo);

        state = std::move(next);

        if (state.step % cfg.time.diagnostics_every == 0) {
            emit_row(state);
            last_row_step = state.step;
        }
        if (cfg.time.snapshot_every > 0 && state.step % cfg.time.snapshot_every == 0) {
            emit_snapshot(state);
            last_snapshot_step = state.step;
        }
    }

    if (state.step != last_row_step) emit_row(state);
    if (state.step != last_snapshot_step) emit_snapshot(state);
    if (opt.write_outputs) {
        render_ppm(state.m, Palette::Spin, out_dir / "m_final.ppm");
        render_ppm(state.phi, Palette::Concentration, out_dir / "phi_final.ppm");
    }

    summary.steps = state.step;
    summary.final_time = state.time;
    summary.final_solvent_ratio = solvent_ratio(state);

    RunArtifacts artifacts;
    artifacts.final_state = std::move(state);
    artifacts.summary = summary;
    return artifacts;
}

}  // namespace nlps
