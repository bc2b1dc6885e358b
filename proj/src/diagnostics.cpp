#include "nlps/diagnostics.hpp"

#include <cmath>
#include <numbers>

namespace nlps {

double compensated_sum(std::span<const double> values) {
    double sum = 0.0, comp = 0.0;
    for (double x : values) {
        const double y = x - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

namespace {

template <typename F>
double transformed_sum(const Field& f, F&& transform) {
    double sum = 0.0, comp = 0.0;
    for (double x : f.data) {
        const double y = transform(x) - comp;
        const double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    return sum;
}

}  // namespace

double mass(const Field& f) { return f.spec.cell_area * compensated_sum(f.data); }

double l1_norm(const Field& f) {
    return f.spec.cell_area * transformed_sum(f, [](double x) { return std::fabs(x); });
}

double solvent_ratio(const State& s) {
    const double l2 = s.phi.spec.length * s.phi.spec.length;
    const double sum = transformed_sum(s.phi, [](double p) { return std::fabs(1.0 - p); });
    return s.phi.spec.cell_area * sum / l2;
}

ScaledL1 scaled_l1(const State& s, const State& s0) {
    ScaledL1 out;
    const double m0 = l1_norm(s0.m);
    const double p0 = l1_norm(s0.phi);
    if (m0 > 0.0) out.m = l1_norm(s.m) / m0;
    if (p0 > 0.0) out.phi = l1_norm(s.phi) / p0;
    return out;
}

std::optional<double> spin_balance(const State& s) {
    const double pos = transformed_sum(s.m, [](double m) { return m > 0.0 ? m : 0.0; });
    const double neg = transformed_sum(s.m, [](double m) { return m < 0.0 ? -m : 0.0; });
    if (neg <= 0.0) return std::nullopt;
    return pos / neg;
}

double free_energy(const State& s, const ConvolutionPlan& plan, double beta, double eps_log) {
    const std::size_t n2 = s.m.size();
    const double log2c = std::numbers::ln2;
    const double inv_beta = 1.0 / beta;

    double bulk = 0.0, comp = 0.0;
    for (std::size_t k = 0; k < n2; ++k) {
        const double m = s.m.data[k];
        const double p = s.phi.data[k];
        const double wp = p + m;
        const double wm = p - m;
        const double sv = 1.0 - p;
        const double entropy = 0.5 * wp * std::log(std::max(wp, eps_log)) +
                               0.5 * wm * std::log(std::max(wm, eps_log)) +
                               sv * std::log(std::max(sv, eps_log)) - p * log2c;
        const double f = p - m * m + inv_beta * entropy;
        const double y = f - comp;
        const double t = bulk + y;
        comp = (t - bulk) - y;
        bulk = t;
    }

    // 1/2 iint J (m - m')^2 = sum m^2 - sum m (J*m), cell_area-weighted.
    const Field jm = plan.convolve(s.m, KernelComponent::J);
    double sq = 0.0, cross = 0.0;
    double csq = 0.0, ccross = 0.0;
    for (std::size_t k = 0; k < n2; ++k) {
        const double m = s.m.data[k];
        {
            const double y = m * m - csq;
            const double t = sq + y;
            csq = (t - sq) - y;
            sq = t;
        }
        {
            const double y = m * jm.data[k] - ccross;
            const double t = cross + y;
            ccross = (t - cross) - y;
            cross = t;
        }
    }

    const double ca = s.m.spec.cell_area;
    return ca * bulk + ca * sq - ca * cross;
}

BoundViolations bound_violations(const State& s) {
    BoundViolations v;
    const std::size_t n2 = s.m.size();
    for (std::size_t k = 0; k < n2; ++k) {
        const double m = s.m.data[k];
        const double p = s.phi.data[k];
        v.m_phi = std::max(v.m_phi, std::fabs(m) - p);
        v.phi_hi = std::max(v.phi_hi, p - 1.0);
        v.phi_lo = std::max(v.phi_lo, -p);
    }
    v.m_phi = std::max(v.m_phi, 0.0);
    v.phi_hi = std::max(v.phi_hi, 0.0);
    v.phi_lo = std::max(v.phi_lo, 0.0);
    return v;
}

MassResiduals mass_balance_residual(const State& prev, const State& next, double dt,
                                    const EvaporationModel& model) {
    MassResiduals r;
    r.m = std::fabs(mass(next.m) - mass(prev.m));
    const double source = prev.phi.spec.cell_area *
                          transformed_sum(prev.phi, [&](double p) { return evaporation_rate(model, p); });
    r.phi = std::fabs(mass(next.phi) - mass(prev.phi) - dt * source);
    return r;
}

DiagnosticsRow collect_diagnostics(const State& s, const State& s0, const ConvolutionPlan& plan,
                                   const PhysicsParams& params, double eps_log) {
    DiagnosticsRow row;
    row.step = s.step;
    row.time = s.time;
    row.solvent_ratio = solvent_ratio(s);
    const ScaledL1 scaled = scaled_l1(s, s0);
    row.l1_m_scaled = scaled.m;
    row.l1_phi_scaled = scaled.phi;
    row.spin_balance = spin_balance(s);
    row.free_energy = free_energy(s, plan, params.beta, eps_log);
    row.mass_m = mass(s.m);
    row.mass_phi = mass(s.phi);
    const BoundViolations v = bound_violations(s);
    row.viol_m_phi = v.m_phi;
    row.viol_phi_hi = v.phi_hi;
    row.viol_phi_lo = v.phi_lo;
    return row;
}

}  // namespace nlps
