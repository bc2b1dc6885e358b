#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "nlps/errors.hpp"

namespace nlps {

/// Periodic square grid: n x n cells covering [0,L)^2, spacing dx = L/n.
struct GridSpec {
    int n = 0;
    double length = 0.0;
    double dx = 0.0;
    double cell_area = 0.0;

    friend bool operator==(const GridSpec&, const GridSpec&) = default;
};

GridSpec make_grid(int n, double length);

/// Mathematical (non-negative) modulo, maps any integer into [0, n).
inline int wrap_index(int i, int n) {
    int r = i % n;
    return r < 0 ? r + n : r;
}

/// One cell-averaged scalar on the grid. Row-major storage with linear
/// index j*n + i, where i is the x index.
struct Field {
    GridSpec spec;
    std::vector<double> data;

    Field() = default;
    explicit Field(const GridSpec& s, double fill = 0.0)
        : spec(s), data(static_cast<std::size_t>(s.n) * s.n, fill) {}

    int n() const { return spec.n; }
    std::size_t size() const { return data.size(); }

    double& at(int i, int j) { return data[static_cast<std::size_t>(j) * spec.n + i]; }
    double at(int i, int j) const { return data[static_cast<std::size_t>(j) * spec.n + i]; }

    double at_wrapped(int i, int j) const {
        return at(wrap_index(i, spec.n), wrap_index(j, spec.n));
    }
};

/// The pair (m, phi) at one instant. For seeded spin initial data the cells
/// satisfy 0 <= |m| <= phi <= 1 exactly.
struct State {
    Field m;
    Field phi;
    double time = 0.0;
    long step = 0;
};

/// Midpoint sampling: data[j*n+i] = f((i+1/2)dx, (j+1/2)dx). Throws InitError
/// if f returns a non-finite value.
Field sample_field(const std::function<double(double, double)>& f, const GridSpec& spec);

/// Per-cell ternary spin draw: sigma = 0 with probability s (solvent),
/// +1 / -1 each with probability (1-s)/2; m = sigma, phi = |sigma|.
/// Deterministic for fixed (seed, n, s): one SplitMix64 counter draw per cell,
/// consumed in linear order j*n+i.
State random_ternary_init(double solvent_ratio, std::uint64_t seed, const GridSpec& spec);

/// SplitMix64 finalizer applied to seed + (counter+1)*golden_gamma. Counter
/// mode makes draws independent of call order and platform.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter);

/// splitmix64_at mapped to a double in [0, 1) using the top 53 bits.
double uniform01_at(std::uint64_t seed, std::uint64_t counter);

}  // namespace nlps
