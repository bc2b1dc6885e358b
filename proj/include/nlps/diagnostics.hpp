#pragma once

#include <optional>
#include <span>

#include "nlps/dynamics.hpp"

namespace nlps {

/// One time-series record of everything monitored during a run. Ratio fields
/// are absent (not 0 or inf) when their denominator vanishes; absent values
/// serialize to an empty CSV cell.
struct DiagnosticsRow {
    long step = 0;
    double time = 0.0;
    double solvent_ratio = 0.0;
    std::optional<double> l1_m_scaled;
    std::optional<double> l1_phi_scaled;
    std::optional<double> spin_balance;
    double free_energy = 0.0;
    double mass_m = 0.0;
    double mass_phi = 0.0;
    double viol_m_phi = 0.0;
    double viol_phi_hi = 0.0;
    double viol_phi_lo = 0.0;
};

/// Sequential Kahan-compensated sum. Deterministic and accurate enough that
/// the discrete mass identities can be checked at 1e-13 * n^2 * cell_area.
double compensated_sum(std::span<const double> values);

/// cell_area-weighted signed sum.
double mass(const Field& f);

/// cell_area-weighted L1 norm.
double l1_norm(const Field& f);

/// Solvent fraction of the domain: (cell_area * sum |1 - phi|) / L^2.
double solvent_ratio(const State& s);

struct ScaledL1 {
    std::optional<double> m;
    std::optional<double> phi;
};

/// (||m||_1 / ||m0||_1, ||phi||_1 / ||phi0||_1); a component is absent when
/// the corresponding initial norm is zero.
ScaledL1 scaled_l1(const State& s, const State& s0);

/// ||m+||_1 / ||m-||_1, absent when the negative part vanishes.
std::optional<double> spin_balance(const State& s);

inline constexpr double kDefaultEpsLog = 1e-12;

/// Free energy: cell_area * sum f(m, phi) plus the interaction term
/// 1/2 iint J(x-x')[m(x)-m(x')]^2, with
///   f = phi - m^2 + (1/beta)[ (phi+m)/2 log(phi+m) + (phi-m)/2 log(phi-m)
///                             + (1-phi) log(1-phi) - phi log 2 ]
/// and each log argument clamped below at eps_log. The interaction is
/// evaluated as cell_area*(sum m^2 - sum m (J*m)), an expansion valid because
/// the discrete kernel has unit mass and is symmetric.
double free_energy(const State& s, const ConvolutionPlan& plan, double beta,
                   double eps_log = kDefaultEpsLog);

struct BoundViolations {
    double m_phi = 0.0;   // max (|m| - phi)+
    double phi_hi = 0.0;  // max (phi - 1)+
    double phi_lo = 0.0;  // max (-phi)+
};

BoundViolations bound_violations(const State& s);

struct MassResiduals {
    double m = 0.0;    // |sum m_next - sum m_prev|, cell_area-weighted
    double phi = 0.0;  // |sum phi_next - sum phi_prev - dt sum F(phi_prev)|
};

MassResiduals mass_balance_residual(const State& prev, const State& next, double dt,
                                    const EvaporationModel& model);

DiagnosticsRow collect_diagnostics(const State& s, const State& s0, const ConvolutionPlan& plan,
                                   const PhysicsParams& params,
                                   double eps_log = kDefaultEpsLog);

}  // namespace nlps
