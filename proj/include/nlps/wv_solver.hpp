#pragma once

#include <utility>
#include <vector>

#include "nlps/dynamics.hpp"

namespace nlps {

/// Symmetrized variables w = phi + m, v = phi - m. Physically admissible
/// states satisfy 0 <= w, v <= 2; the bound is monitored, never enforced.
struct WVState {
    Field w;
    Field v;
    double time = 0.0;
    long step = 0;
};

WVState to_wv(const State& s);
State from_wv(const WVState& wv);

struct PicardReport {
    int iterates_used = 0;
    std::vector<double> residuals;  // successive gaps ||w_{n+1}-w_n||_2 + ||v_{n+1}-v_n||_2
    bool converged = false;
};

/// Default stopping tolerance 1e-12 * n for the combined L2 gap.
inline double default_picard_tol(const GridSpec& spec) { return 1e-12 * spec.n; }
inline constexpr int kDefaultPicardMaxIters = 50;

/// One time step of the frozen-drift fixed-point iteration. The coefficients
/// B1 = beta(m_bar - 1), B2 = beta(m_bar + 1) are frozen at the incoming
/// state's m_bar = (w - v)/2; each iterate applies one explicit update
///   w_{n+1} = w_in + dt [ lap(w_n)/dx^2
///             + (1/(2 dx))(D1_i[B1 Kx w_n] + D1_j[B1 Ky w_n])
///             + F((w_n + v_n)/2) ]
/// (and symmetrically for v with B2), where (Kx, Ky) = grad J * (w_n - v_n),
/// using the same D1/D2 stencils as the explicit scheme. Iteration stops when
/// the combined L2 gap drops below tol or after max_iters iterates; running
/// out of iterates is reported, not thrown.
std::pair<WVState, PicardReport> picard_time_step(const WVState& wv, double dt,
                                                  const PhysicsParams& params,
                                                  const ConvolutionPlan& plan, double tol,
                                                  int max_iters = kDefaultPicardMaxIters);

/// Advances s one step through step_explicit and, independently, through
/// to_wv -> picard_time_step -> from_wv; returns the max-norm discrepancy
/// between the two next states over both fields.
double crosscheck_against_explicit(const State& s, double dt, const PhysicsParams& params,
                                   const ConvolutionPlan& plan, double tol);

}  // namespace nlps
