#pragma once

#include <optional>

#include "nlps/grid.hpp"
#include "nlps/kernel.hpp"
#include "nlps/spectral.hpp"

namespace nlps {

enum class EvaporationKind { None, Linear };

/// 'From the top' evaporation source for the concentration equation. The
/// linear model is F(r) = alpha*(1-r) on [0,1], extended by zero to the rest
/// of the real line, so F is nonnegative and F(1) = 0.
struct EvaporationModel {
    EvaporationKind kind = EvaporationKind::None;
    double alpha = 0.0;

    static EvaporationModel none() { return {EvaporationKind::None, 0.0}; }
    static EvaporationModel linear(double alpha) { return {EvaporationKind::Linear, alpha}; }
};

inline double evaporation_rate(const EvaporationModel& model, double r) {
    if (model.kind == EvaporationKind::Linear && r >= 0.0 && r <= 1.0) {
        return model.alpha * (1.0 - r);
    }
    return 0.0;
}

struct PhysicsParams {
    double beta = 1.0;
    EvaporationModel evap;
};

struct TimeParams {
    std::optional<double> dt;  // nullopt = resolve via auto_dt
    double t_end = 0.0;
    long snapshot_every = 0;  // 0 = only first/last
    long diagnostics_every = 100;
};

/// Diffusion-plus-advection CFL heuristic with safety factor 0.5:
///   dt = 0.5 dx^2 / (4 + 2 beta G dx),   G = cell_area * sum |djx_grid|.
/// G bounds sup|dJ/dx * m| for |m| <= 1; the same bound applies to y by
/// symmetry of the kernel.
double auto_dt(const GridSpec& spec, const PhysicsParams& params, const KernelGrids& kg);

/// One step of the fully explicit finite-volume scheme:
///   m' = m + dt [ (D2_i[m] + D2_j[m])/dx^2
///                 - (beta/dx)(D1_i[(phi - m^2) Jx] + D1_j[(phi - m^2) Jy]) ]
///   phi' = phi + dt [ (D2_i[phi] + D2_j[phi])/dx^2
///                 - (beta/dx)(D1_i[m(1-phi) Jx] + D1_j[m(1-phi) Jy]) + F(phi) ]
/// with D2_l[f] = f_{l+1} - 2 f_l + f_{l-1}, D1_l[f] = f_{l+1} - f_{l-1},
/// periodic indices, and Jx = dJ/dx * m, Jy = dJ/dy * m from the plan. The
/// drift products are formed pointwise before differencing. Throws
/// BlowUpError when any output cell is non-finite.
State step_explicit(const State& s, const PhysicsParams& params, double dt,
                    const ConvolutionPlan& plan);

}  // namespace nlps
