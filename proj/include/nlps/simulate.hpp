#pragma once

#include <functional>
#include <optional>

#include "nlps/io_runtime.hpp"

namespace nlps {

struct RunSummary {
    long steps = 0;
    double final_time = 0.0;
    double dt = 0.0;
    double auto_dt_value = 0.0;
    bool dt_exceeds_auto = false;
    double final_solvent_ratio = 0.0;
    double max_viol_m_phi = 0.0;
    double max_viol_phi_hi = 0.0;
    double max_viol_phi_lo = 0.0;
    double max_mass_residual_m = 0.0;
    double max_mass_residual_phi = 0.0;
};

struct RunArtifacts {
    State final_state;
    RunSummary summary;
};

struct SimulateOptions {
    bool write_outputs = true;
    std::optional<std::filesystem::path> out_dir;  // overrides cfg.output_dir
    std::function<void(const DiagnosticsRow&)> on_row;
    std::function<void(const State&)> on_snapshot;
};

/// Runs the configured problem with the explicit scheme: builds grid, kernel,
/// plan and initial state, then steps until time >= t_end (the step count is
/// ceil(t_end/dt), computed robustly so a t_end that is an exact multiple of
/// dt runs exactly t_end/dt steps). Emits a diagnostics row every
/// diagnostics_every steps, a snapshot every snapshot_every steps (plus the
/// initial and final ones), and start/end renders of both fields.
/// Deterministic for a fixed config.
RunArtifacts simulate(const RunConfig& cfg, const SimulateOptions& opt = {});

}  // namespace nlps
