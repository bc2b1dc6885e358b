#include "nlps/kernel.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace nlps {

namespace {

// Sequential Kahan sum; deterministic regardless of optimization level.
double compensated_sum_abs(const std::vector<double>& v, bool absolute) {
    double sum = 0.0, comp = 0.0;
    for (double x : v) {
        const double term = absolute ? std::fabs(x) : x;
        const double y = term - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace

double KernelSpec::value(double x, double y) const {
    const double q = (x * x + y * y) / (radius * radius);
    if (q >= 1.0) return 0.0;
    const double b = 1.0 - q;
    return norm_const * b * b * b;
}

double KernelSpec::grad_x(double x, double y) const {
    const double r2 = radius * radius;
    const double q = (x * x + y * y) / r2;
    if (q >= 1.0) return 0.0;
    const double b = 1.0 - q;
    return -6.0 * norm_const * x / r2 * b * b;
}

double KernelSpec::grad_y(double x, double y) const {
    const double r2 = radius * radius;
    const double q = (x * x + y * y) / r2;
    if (q >= 1.0) return 0.0;
    const double b = 1.0 - q;
    return -6.0 * norm_const * y / r2 * b * b;
}

KernelSpec make_bump_kernel(double radius) {
    if (!(radius > 0.0) || !std::isfinite(radius)) {
        throw ConfigError("kernel radius must be positive, got " + std::to_string(radius));
    }
    KernelSpec ks;
    ks.radius = radius;
    // int_{R^2} (1 - r^2/R^2)^3 dr = pi R^2 / 4
    ks.norm_const = 4.0 / (std::numbers::pi * radius * radius);
    return ks;
}

KernelGrids sample_kernel_grids(const KernelSpec& ks, const GridSpec& spec) {
    if (!(ks.radius < spec.length / 2.0)) {
        throw ConfigError("kernel radius exceeds half-domain: R = " + std::to_string(ks.radius) +
                          ", L/2 = " + std::to_string(spec.length / 2.0));
    }
    KernelGrids kg;
    kg.kernel = ks;
    kg.j_grid = Field(spec);
    kg.djx_grid = Field(spec);
    kg.djy_grid = Field(spec);

    const int n = spec.n;
    const int half = n / 2;
    for (int j = 0; j < n; ++j) {
        const double y = spec.dx * (wrap_index(j + half, n) - half);
        for (int i = 0; i < n; ++i) {
            const double x = spec.dx * (wrap_index(i + half, n) - half);
            kg.j_grid.at(i, j) = ks.value(x, y);
            kg.djx_grid.at(i, j) = ks.grad_x(x, y);
            kg.djy_grid.at(i, j) = ks.grad_y(x, y);
        }
    }

    // Exact discrete normalization: cell_area * sum(j_grid) = 1. The origin
    // sample J(0) = c > 0 guarantees a nonzero sum even for R < dx.
    const double sum_j = compensated_sum_abs(kg.j_grid.data, false);
    const double scale = 1.0 / (spec.cell_area * sum_j);
    for (double& v : kg.j_grid.data) v *= scale;

    // De-mean the gradient grids so convolving a constant gives zero.
    const double cells = static_cast<double>(kg.j_grid.size());
    const double mean_x = compensated_sum_abs(kg.djx_grid.data, false) / cells;
    for (double& v : kg.djx_grid.data) v -= mean_x;
    const double mean_y = compensated_sum_abs(kg.djy_grid.data, false) / cells;
    for (double& v : kg.djy_grid.data) v -= mean_y;

    return kg;
}

}  // namespace nlps
