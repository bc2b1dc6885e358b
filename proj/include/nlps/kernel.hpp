#pragma once

#include "nlps/grid.hpp"

namespace nlps {

/// Compactly supported interaction potential
///   J(r) = c (1 - |r|^2/R^2)^3   for |r| <= R,   0 otherwise,
/// with c = 4/(pi R^2) so the integral over the plane is 1. The cubic bump is
/// C^2 at the support edge and its gradient has a closed form, so the drift
/// kernels are sampled analytically instead of by differencing.
struct KernelSpec {
    double radius = 0.0;
    double norm_const = 0.0;

    double value(double x, double y) const;
    double grad_x(double x, double y) const;
    double grad_y(double x, double y) const;
};

KernelSpec make_bump_kernel(double radius);

/// J, dJ/dx, dJ/dy sampled wrap-centered on a grid (displacement for index i
/// is dx*(((i + n/2) mod n) - n/2)). After sampling, j_grid is rescaled so
/// cell_area * sum = 1 exactly and the gradient grids are de-meaned so their
/// sums vanish: the discrete counterparts of int J = 1 and grad J * const = 0.
struct KernelGrids {
    KernelSpec kernel;
    Field j_grid;
    Field djx_grid;
    Field djy_grid;
};

KernelGrids sample_kernel_grids(const KernelSpec& ks, const GridSpec& spec);

}  // namespace nlps
