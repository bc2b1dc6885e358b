#include "nlps/grid.hpp"

#include <cmath>
#include <string>

namespace nlps {

GridSpec make_grid(int n, double length) {
    if (n < 4) {
        throw ConfigError("grid n must be >= 4, got " + std::to_string(n));
    }
    if (!(length > 0.0) || !std::isfinite(length)) {
        throw ConfigError("grid length must be positive, got " + std::to_string(length));
    }
    GridSpec spec;
    spec.n = n;
    spec.length = length;
    spec.dx = length / n;
    spec.cell_area = spec.dx * spec.dx;
    return spec;
}

Field sample_field(const std::function<double(double, double)>& f, const GridSpec& spec) {
    Field out(spec);
    for (int j = 0; j < spec.n; ++j) {
        const double y = (j + 0.5) * spec.dx;
        for (int i = 0; i < spec.n; ++i) {
            const double x = (i + 0.5) * spec.dx;
            const double v = f(x, y);
            if (!std::isfinite(v)) {
                throw InitError("non-finite sample at cell (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
            }
            out.at(i, j) = v;
        }
    }
    return out;
}

std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t counter) {
    std::uint64_t z = seed + (counter + 1) * 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double uniform01_at(std::uint64_t seed, std::uint64_t counter) {
    return static_cast<double>(splitmix64_at(seed, counter) >> 11) * 0x1.0p-53;
}

State random_ternary_init(double solvent_ratio, std::uint64_t seed, const GridSpec& spec) {
    if (!(solvent_ratio >= 0.0 && solvent_ratio <= 1.0)) {
        throw ConfigError("solvent_ratio must lie in [0, 1], got " +
                          std::to_string(solvent_ratio));
    }
    State st;
    st.m = Field(spec);
    st.phi = Field(spec);
    const double plus_threshold = solvent_ratio + (1.0 - solvent_ratio) / 2.0;
    const std::size_t cells = st.m.size();
    for (std::size_t k = 0; k < cells; ++k) {
        const double u = uniform01_at(seed, k);
        double sigma = 0.0;
        if (u >= solvent_ratio) {
            sigma = (u < plus_threshold) ? 1.0 : -1.0;
        }
        st.m.data[k] = sigma;
        st.phi.data[k] = std::fabs(sigma);
    }
    st.time = 0.0;
    st.step = 0;
    return st;
}

}  // namespace nlps
