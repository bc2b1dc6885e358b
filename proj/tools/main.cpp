#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include <CLI11.hpp>

#include "nlps/simulate.hpp"
#include "nlps/studies.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitBlowUp = 2;
constexpr int kExitIo = 3;
constexpr int kExitPicard = 4;

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    nlps::RunConfig cfg = nlps::load_config(config_path);
    nlps::SimulateOptions opt;
    if (!out_dir.empty()) opt.out_dir = out_dir;

    const nlps::RunArtifacts artifacts = nlps::simulate(cfg, opt);
    const nlps::RunSummary& s = artifacts.summary;
    if (s.dt_exceeds_auto) {
        std::fprintf(stderr, "warning: dt = %.6g exceeds the stability heuristic auto_dt = %.6g\n",
                     s.dt, s.auto_dt_value);
    }
    std::printf("run complete: t = %.6g, steps = %ld, solvent_ratio = %.6g, "
                "max violations = (%.3g, %.3g, %.3g)\n",
                s.final_time, s.steps, s.final_solvent_ratio, s.max_viol_m_phi, s.max_viol_phi_hi,
                s.max_viol_phi_lo);
    return kExitOk;
}

int cmd_oracle_check(int n, double radius, std::uint64_t seed) {
    const nlps::GridSpec spec = nlps::make_grid(n, 1.0);
    const nlps::KernelGrids kg = nlps::sample_kernel_grids(nlps::make_bump_kernel(radius), spec);
    const nlps::ConvolutionPlan plan(kg);

    nlps::Field f(spec);
    for (std::size_t k = 0; k < f.size(); ++k) {
        f.data[k] = 2.0 * nlps::uniform01_at(seed, k) - 1.0;
    }

    double max_diff = 0.0;
    const std::pair<nlps::KernelComponent, const nlps::Field*> kernels[] = {
        {nlps::KernelComponent::J, &kg.j_grid},
        {nlps::KernelComponent::DJX, &kg.djx_grid},
        {nlps::KernelComponent::DJY, &kg.djy_grid},
    };
    for (const auto& [which, grid] : kernels) {
        const nlps::Field fast = plan.convolve(f, which);
        const nlps::Field slow = nlps::convolve_direct(f, *grid);
        for (std::size_t k = 0; k < fast.size(); ++k) {
            max_diff = std::max(max_diff, std::fabs(fast.data[k] - slow.data[k]));
        }
    }
    std::printf("oracle-check: n = %d, max |fft - direct| = %.3e\n", n, max_diff);
    if (max_diff > 1e-10) {
        std::fprintf(stderr, "oracle-check failed: discrepancy %.3e exceeds 1e-10\n", max_diff);
        return kExitConfig;
    }
    return kExitOk;
}

int cmd_refine_study(const std::string& config_path, int levels, const std::string& csv_out) {
    nlps::RunConfig cfg = nlps::load_config(config_path);
    const nlps::RefineReport report = nlps::refine_study(cfg, levels);

    std::string csv = "level,n,dt,diff_m,diff_phi,order_m,order_phi\n";
    for (std::size_t k = 0; k < report.ns.size(); ++k) {
        char line[256];
        std::string diff_m, diff_phi, order_m, order_phi;
        if (k < report.diff_m.size()) {
            diff_m = std::to_string(report.diff_m[k]);
            diff_phi = std::to_string(report.diff_phi[k]);
        }
        if (k < report.order_m.size()) {
            order_m = std::to_string(report.order_m[k]);
            order_phi = std::to_string(report.order_phi[k]);
        }
        std::snprintf(line, sizeof(line), "%zu,%d,%.17g,%s,%s,%s,%s\n", k, report.ns[k],
                      report.dts[k], diff_m.c_str(), diff_phi.c_str(), order_m.c_str(),
                      order_phi.c_str());
        csv += line;
    }
    std::ofstream out(csv_out, std::ios::trunc);
    if (!out) throw nlps::IoError("cannot open " + csv_out + " for writing");
    out << csv;

    for (std::size_t k = 0; k < report.ns.size(); ++k) {
        std::printf("level %zu: n = %d, dt = %.6g\n", k, report.ns[k], report.dts[k]);
    }
    for (std::size_t k = 0; k < report.diff_m.size(); ++k) {
        std::printf("diff %d->%d: |m| = %.6e, |phi| = %.6e\n", report.ns[k], report.ns[k + 1],
                    report.diff_m[k], report.diff_phi[k]);
    }
    for (std::size_t k = 0; k < report.order_m.size(); ++k) {
        std::printf("observed order: m = %.3f, phi = %.3f\n", report.order_m[k],
                    report.order_phi[k]);
    }
    return kExitOk;
}

int cmd_picard_study(const std::string& config_path, long steps, const std::string& csv_out) {
    nlps::RunConfig cfg = nlps::load_config(config_path);
    const nlps::PicardStudyReport report = nlps::picard_study(cfg, steps);

    std::string csv = "step,time,iterates,converged,first_residual,last_residual,mean_ratio,"
                      "crosscheck\n";
    for (const nlps::PicardStudyStep& s : report.steps) {
        char line[256];
        std::string ratio;
        if (s.mean_ratio) ratio = std::to_string(*s.mean_ratio);
        std::snprintf(line, sizeof(line), "%ld,%.17g,%d,%d,%.6e,%.6e,%s,%.6e\n", s.step, s.time,
                      s.iterates, s.converged ? 1 : 0, s.first_residual, s.last_residual,
                      ratio.c_str(), s.crosscheck);
        csv += line;
    }
    std::ofstream out(csv_out, std::ios::trunc);
    if (!out) throw nlps::IoError("cannot open " + csv_out + " for writing");
    out << csv;

    for (const nlps::PicardStudyStep& s : report.steps) {
        std::printf("step %ld: iterates = %d%s, gap to explicit = %.3e\n", s.step, s.iterates,
                    s.converged ? "" : " (NOT CONVERGED)", s.crosscheck);
    }
    if (report.geometric_mean_ratio) {
        std::printf("geometric-mean residual contraction ratio = %.4f\n",
                    *report.geometric_mean_ratio);
    } else {
        std::printf("geometric-mean residual contraction ratio = (no ratios recorded)\n");
    }
    std::printf("max gap to explicit scheme = %.3e (dt = %.6g)\n", report.max_crosscheck,
                report.dt);
    if (!report.all_converged) {
        std::fprintf(stderr, "picard-study: some steps did not converge within the iterate cap\n");
        return kExitPicard;
    }
    return kExitOk;
}

int cmd_render(const std::string& snapshot_path, const std::string& field,
               const std::string& out_path) {
    const nlps::State s = nlps::read_snapshot(snapshot_path);
    if (field == "m") {
        nlps::render_ppm(s.m, nlps::Palette::Spin, out_path);
    } else {
        nlps::render_ppm(s.phi, nlps::Palette::Concentration, out_path);
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic simulator for nonlocal ternary phase separation with evaporation"};
    app.require_subcommand(1);

    std::string config_path, out_dir, snapshot_path, field, out_path;
    int oracle_n = 16, levels = 3;
    long steps = 50;
    double radius = 0.2;
    std::uint64_t seed = 1;
    std::string refine_csv = "refine_study.csv";
    std::string picard_csv = "picard_study.csv";

    CLI::App* run = app.add_subcommand("run", "run the configured simulation");
    run->add_option("--config", config_path, "JSON config path")->required();
    run->add_option("--out", out_dir, "output directory (overrides config)");

    CLI::App* oracle = app.add_subcommand("oracle-check",
                                          "compare FFT convolution against direct summation");
    oracle->add_option("--n", oracle_n, "grid size (<= 64, the oracle is O(N^4))")
        ->check(CLI::Range(4, 64));
    oracle->add_option("--radius", radius, "kernel radius")->check(CLI::PositiveNumber);
    oracle->add_option("--seed", seed, "random field seed");

    CLI::App* refine = app.add_subcommand("refine-study", "self-convergence study under grid refinement");
    refine->add_option("--config", config_path, "JSON config path")->required();
    refine->add_option("--levels", levels, "number of refinement levels (>= 2)")
        ->check(CLI::Range(2, 8));
    refine->add_option("--csv", refine_csv, "output CSV path");

    CLI::App* picard = app.add_subcommand("picard-study",
                                          "advance with the Picard solver and record contraction");
    picard->add_option("--config", config_path, "JSON config path")->required();
    picard->add_option("--steps", steps, "number of time steps")->check(CLI::PositiveNumber);
    picard->add_option("--csv", picard_csv, "output CSV path");

    CLI::App* render = app.add_subcommand("render", "render a snapshot field to PPM");
    render->add_option("--snapshot", snapshot_path, "snapshot path")->required();
    render->add_option("--field", field, "m | phi")
        ->required()
        ->check(CLI::IsMember({"m", "phi"}));
    render->add_option("--out", out_path, "output PPM path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir);
        if (oracle->parsed()) return cmd_oracle_check(oracle_n, radius, seed);
        if (refine->parsed()) return cmd_refine_study(config_path, levels, refine_csv);
        if (picard->parsed()) return cmd_picard_study(config_path, steps, picard_csv);
        if (render->parsed()) return cmd_render(snapshot_path, field, out_path);
    } catch (const nlps::BlowUpError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitBlowUp;
    } catch (const nlps::FormatError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const nlps::IoError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitIo;
    } catch (const nlps::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const nlps::InitError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitConfig;
}
