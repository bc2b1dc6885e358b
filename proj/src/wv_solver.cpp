#include "nlps/wv_solver.hpp"

#include <cmath>
#include <string>

#include "nlps/diagnostics.hpp"

namespace nlps {

WVState to_wv(const State& s) {
    WVState wv;
    wv.w = Field(s.m.spec);
    wv.v = Field(s.m.spec);
    wv.time = s.time;
    wv.step = s.step;
    const std::size_t n2 = s.m.size();
    for (std::size_t k = 0; k < n2; ++k) {
        wv.w.data[k] = s.phi.data[k] + s.m.data[k];
        wv.v.data[k] = s.phi.data[k] - s.m.data[k];
    }
    return wv;
}

State from_wv(const WVState& wv) {
    State s;
    s.m = Field(wv.w.spec);
    s.phi = Field(wv.w.spec);
    s.time = wv.time;
    s.step = wv.step;
    const std::size_t n2 = wv.w.size();
    for (std::size_t k = 0; k < n2; ++k) {
        s.m.data[k] = 0.5 * (wv.w.data[k] - wv.v.data[k]);
        s.phi.data[k] = 0.5 * (wv.w.data[k] + wv.v.data[k]);
    }
    return s;
}

namespace {

// cell_area-weighted L2 norm of the gap between two fields.
double l2_gap(const Field& a, const Field& b) {
    double sum = 0.0, comp = 0.0;
    const std::size_t n2 = a.size();
    for (std::size_t k = 0; k < n2; ++k) {
        const double d = a.data[k] - b.data[k];
        const double y = d * d - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return std::sqrt(a.spec.cell_area * sum);
}

// w_in + dt [ diffusion of u + div(B (Kx, Ky) u) + F(phi_n) ], the shared
// form of both half-updates. B is a per-cell frozen coefficient field.
Field linearized_update(const Field& base, const Field& u, const Field& coeff, const Field& kx,
                        const Field& ky, const Field& phi_n, double dt,
                        const EvaporationModel& evap) {
    const GridSpec& spec = base.spec;
    const int n = spec.n;
    const double inv_dx2 = 1.0 / (spec.dx * spec.dx);
    const double inv_2dx = 1.0 / (2.0 * spec.dx);

    Field px(spec), py(spec);
    const std::size_t n2 = base.size();
    for (std::size_t k = 0; k < n2; ++k) {
        const double c = coeff.data[k] * u.data[k];
        px.data[k] = c * kx.data[k];
        py.data[k] = c * ky.data[k];
    }

    Field out(spec);
    for (int j = 0; j < n; ++j) {
        const int jp = (j + 1 == n) ? 0 : j + 1;
        const int jm = (j == 0) ? n - 1 : j - 1;
        for (int i = 0; i < n; ++i) {
            const int ip = (i + 1 == n) ? 0 : i + 1;
            const int im = (i == 0) ? n - 1 : i - 1;
            const double uc = u.at(i, j);
            const double lap = (u.at(ip, j) - 2.0 * uc + u.at(im, j)) +
                               (u.at(i, jp) - 2.0 * uc + u.at(i, jm));
            const double drift = (px.at(ip, j) - px.at(im, j)) + (py.at(i, jp) - py.at(i, jm));
            const double rhs = inv_dx2 * lap + inv_2dx * drift +
                               evaporation_rate(evap, phi_n.at(i, j));
            out.at(i, j) = base.at(i, j) + dt * rhs;
        }
    }
    return out;
}

// index of the first non-finite entry, or -1 if all finite
long first_bad_cell(const Field& f) {
    for (std::size_t k = 0; k < f.size(); ++k) {
        if (!std::isfinite(f.data[k])) return static_cast<long>(k);
    }
    return -1;
}

}  // namespace

std::pair<WVState, PicardReport> picard_time_step(const WVState& wv, double dt,
                                                  const PhysicsParams& params,
                                                  const ConvolutionPlan& plan, double tol,
                                                  int max_iters) {
    if (!(dt > 0.0) || !(tol > 0.0) || max_iters < 1) {
        throw ConfigError("picard_time_step requires dt > 0, tol > 0 and max_iters >= 1");
    }
    if (!(wv.w.spec == plan.spec())) {
        throw ConfigError("picard_time_step: state and plan grids differ");
    }

    const GridSpec& spec = wv.w.spec;
    const std::size_t n2 = wv.w.size();

    // Frozen coefficients from the incoming state.
    Field b1(spec), b2(spec), phi_n(spec);
    for (std::size_t k = 0; k < n2; ++k) {
        const double m_bar = 0.5 * (wv.w.data[k] - wv.v.data[k]);
        b1.data[k] = params.beta * (m_bar - 1.0);
        b2.data[k] = params.beta * (m_bar + 1.0);
    }

    Field wn = wv.w;
    Field vn = wv.v;
    Field diff(spec);

    PicardReport report;
    for (int iter = 0; iter < max_iters; ++iter) {
        for (std::size_t k = 0; k < n2; ++k) {
            diff.data[k] = wn.data[k] - vn.data[k];
            phi_n.data[k] = 0.5 * (wn.data[k] + vn.data[k]);
        }
        const auto [kx, ky] = plan.convolve_gradient_pair(diff);

        Field w_next = linearized_update(wv.w, wn, b1, kx, ky, phi_n, dt, params.evap);
        Field v_next = linearized_update(wv.v, vn, b2, kx, ky, phi_n, dt, params.evap);

        long bad = first_bad_cell(w_next);
        if (bad < 0) bad = first_bad_cell(v_next);
        if (bad >= 0) {
            const int bi = static_cast<int>(bad) % spec.n;
            const int bj = static_cast<int>(bad) / spec.n;
            throw BlowUpError(wv.step + 1, bi, bj, 0.5 * dt,
                              "non-finite Picard iterate at step " + std::to_string(wv.step + 1) +
                                  ", cell (" + std::to_string(bi) + ", " + std::to_string(bj) +
                                  "); retry with dt <= " + std::to_string(0.5 * dt));
        }

        const double gap = l2_gap(w_next, wn) + l2_gap(v_next, vn);
        report.residuals.push_back(gap);
        report.iterates_used = iter + 1;
        wn = std::move(w_next);
        vn = std::move(v_next);
        if (gap < tol) {
            report.converged = true;
            break;
        }
    }

    WVState out;
    out.w = std::move(wn);
    out.v = std::move(vn);
    out.time = wv.time + dt;
    out.step = wv.step + 1;
    return {std::move(out), std::move(report)};
}

double crosscheck_against_explicit(const State& s, double dt, const PhysicsParams& params,
                                   const ConvolutionPlan& plan, double tol) {
    const State explicit_next = step_explicit(s, params, dt, plan);
    const auto [wv_next, report] = picard_time_step(to_wv(s), dt, params, plan, tol);
    const State picard_next = from_wv(wv_next);

    double max_diff = 0.0;
    const std::size_t n2 = s.m.size();
    for (std::size_t k = 0; k < n2; ++k) {
        max_diff = std::max(max_diff,
                            std::fabs(explicit_next.m.data[k] - picard_next.m.data[k]));
        max_diff = std::max(max_diff,
                            std::fabs(explicit_next.phi.data[k] - picard_next.phi.data[k]));
    }
    return max_diff;
}

}  // namespace nlps
