#include "nlps/dynamics.hpp"

#include <cmath>
#include <string>

namespace nlps {

double auto_dt(const GridSpec& spec, const PhysicsParams& params, const KernelGrids& kg) {
    double sum_abs = 0.0, comp = 0.0;
    for (double x : kg.djx_grid.data) {
        const double y = std::fabs(x) - comp;
        const double t = sum_abs + y;
        comp = (t - sum_abs) - y;
        sum_abs = t;
    }
    const double G = spec.cell_area * sum_abs;
    return 0.5 * spec.dx * spec.dx / (4.0 + 2.0 * params.beta * G * spec.dx);
}

State step_explicit(const State& s, const PhysicsParams& params, double dt,
                    const ConvolutionPlan& plan) {
    if (!(dt > 0.0)) {
        throw ConfigError("step_explicit requires dt > 0, got " + std::to_string(dt));
    }
    if (!(s.m.spec == s.phi.spec) || !(s.m.spec == plan.spec())) {
        throw ConfigError("step_explicit: state and plan grids differ");
    }

    const GridSpec& spec = s.m.spec;
    const int n = spec.n;
    const double inv_dx2 = 1.0 / (spec.dx * spec.dx);
    const double beta_dx = params.beta / spec.dx;

    const auto [jx, jy] = plan.convolve_gradient_pair(s.m);

    // Drift products, formed pointwise before the D1 differences.
    Field gmx(spec), gmy(spec), gpx(spec), gpy(spec);
    const std::size_t n2 = s.m.size();
    for (std::size_t k = 0; k < n2; ++k) {
        const double mk = s.m.data[k];
        const double pk = s.phi.data[k];
        const double cm = pk - mk * mk;    // m-equation coefficient
        const double cp = mk * (1.0 - pk); // phi-equation coefficient
        gmx.data[k] = cm * jx.data[k];
        gmy.data[k] = cm * jy.data[k];
        gpx.data[k] = cp * jx.data[k];
        gpy.data[k] = cp * jy.data[k];
    }

    State out;
    out.m = Field(spec);
    out.phi = Field(spec);
    out.time = s.time + dt;
    out.step = s.step + 1;

    bool finite = true;
    int bad_i = 0, bad_j = 0;

    for (int j = 0; j < n; ++j) {
        const int jp = (j + 1 == n) ? 0 : j + 1;
        const int jm = (j == 0) ? n - 1 : j - 1;
        for (int i = 0; i < n; ++i) {
            const int ip = (i + 1 == n) ? 0 : i + 1;
            const int im = (i == 0) ? n - 1 : i - 1;

            const double mc = s.m.at(i, j);
            const double pc = s.phi.at(i, j);

            const double lap_m = (s.m.at(ip, j) - 2.0 * mc + s.m.at(im, j)) +
                                 (s.m.at(i, jp) - 2.0 * mc + s.m.at(i, jm));
            const double lap_p = (s.phi.at(ip, j) - 2.0 * pc + s.phi.at(im, j)) +
                                 (s.phi.at(i, jp) - 2.0 * pc + s.phi.at(i, jm));

            const double drift_m = (gmx.at(ip, j) - gmx.at(im, j)) +
                                   (gmy.at(i, jp) - gmy.at(i, jm));
            const double drift_p = (gpx.at(ip, j) - gpx.at(im, j)) +
                                   (gpy.at(i, jp) - gpy.at(i, jm));

            const double rhs_m = inv_dx2 * lap_m - beta_dx * drift_m;
            const double rhs_p = inv_dx2 * lap_p - beta_dx * drift_p +
                                 evaporation_rate(params.evap, pc);

            const double m_next = mc + dt * rhs_m;
            const double p_next = pc + dt * rhs_p;
            out.m.at(i, j) = m_next;
            out.phi.at(i, j) = p_next;

            if (finite && (!std::isfinite(m_next) || !std::isfinite(p_next))) {
                finite = false;
                bad_i = i;
                bad_j = j;
            }
        }
    }

    if (!finite) {
        throw BlowUpError(out.step, bad_i, bad_j, 0.5 * dt,
                          "non-finite value at step " + std::to_string(out.step) + ", cell (" +
                              std::to_string(bad_i) + ", " + std::to_string(bad_j) +
                              "); retry with dt <= " + std::to_string(0.5 * dt));
    }
    return out;
}

}  // namespace nlps
