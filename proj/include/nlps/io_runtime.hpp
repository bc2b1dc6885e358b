#pragma once

#include <filesystem>
#include <string>

#include "nlps/diagnostics.hpp"

namespace nlps {

enum class InitType { SpinRandom, Sinusoid, File };

struct InitSpec {
    InitType type = InitType::SpinRandom;
    // spin_random
    double solvent_ratio = 0.8;
    std::uint64_t seed = 0;
    // sinusoid: m = m_amplitude sin(2 pi x/L) sin(2 pi y/L),
    //           phi = phi_mean + phi_amplitude cos(2 pi x/L) cos(2 pi y/L)
    double m_amplitude = 0.2;
    double phi_mean = 0.6;
    double phi_amplitude = 0.2;
    // file
    std::filesystem::path path;
};

struct RunConfig {
    GridSpec grid;
    double kernel_radius = 0.0;
    PhysicsParams physics;
    TimeParams time;
    InitSpec init;
    std::filesystem::path output_dir = "out";
};

/// Parses and validates a UTF-8 JSON configuration. Unknown keys are errors;
/// missing optional keys take the documented defaults (dt = "auto",
/// snapshot_every = 0, diagnostics_every = 100, kernel.radius = 0.05*length).
RunConfig parse_config(const std::string& text);

/// parse_config applied to the contents of a file.
RunConfig load_config(const std::filesystem::path& path);

/// Builds the initial state described by cfg.init on cfg.grid.
State make_initial_state(const RunConfig& cfg);

// --- snapshot format -------------------------------------------------------
// magic "NLPS", version byte 0x01, then little-endian: u32 n, f64 length,
// f64 time, u64 step, n^2 f64 for m (row-major, index j*n+i), n^2 f64 for
// phi. Total size 33 + 16 n^2 bytes.

void write_snapshot(const State& s, const std::filesystem::path& path);
State read_snapshot(const std::filesystem::path& path);

// --- diagnostics CSV -------------------------------------------------------

std::string diagnostics_csv_header();

/// One CSV line; doubles carry 17 significant digits so the decimal
/// round-trips exactly, absent ratios serialize as empty fields.
std::string format_diagnostics_row(const DiagnosticsRow& row);

/// Appends row to path, writing the header first when the file is new/empty.
void append_diagnostics_row(const DiagnosticsRow& row, const std::filesystem::path& path);

// --- field rendering -------------------------------------------------------

enum class Palette {
    Spin,          // red -> blue over m in [0,1], red -> yellow over m in [-1,0]
    Concentration  // red -> blue over phi in [0,1]
};

/// Binary PPM (P6, maxval 255), one pixel per cell, row j = 0 at the top.
/// Values outside the palette domain are clamped.
void render_ppm(const Field& f, Palette palette, const std::filesystem::path& path);

}  // namespace nlps
