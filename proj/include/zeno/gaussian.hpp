#pragma once

// Gaussian reservoir states and the analytic side of the strong-coupling
// dynamics: Weyl expectations, the exact Heisenberg evolution of system
// blocks tensored with Weyl operators, closed-form dephasing of the reduced
// state for commuting system/coupling pairs, decoherence functions, Wick
// moments and moment growth bounds.
//
// Mode functions are complex coefficient vectors over the discretized
// reservoir modes; the scalar product is conjugate-linear in the first slot.

#include <vector>

#include "zeno/linalg.hpp"
#include "zeno/model.hpp"

namespace zeno {

using ModeFunction = Vector;

// E(t, w) = int_0^t e^{iws} ds = (e^{iwt} - 1) / (iw).
// Branches: |w| < 1e-13 returns t exactly; |wt| < 1e-4 uses the Taylor
// series; otherwise a half-angle product form with no cancellation.
Complex drive_kernel(double t, double omega);

// Psi(t, w) = int_0^t (1 - cos(ws)) / w ds = (wt - sin wt) / w^2.
// Branches: |w| < 1e-13 returns 0; |wt| < 0.5 uses the Taylor series
// (covering the pinned |wt| < 1e-4 regime and the cancellation pocket
// above it); otherwise the closed form.
double phase_lag_kernel(double t, double omega);

// coth(beta w / 2); beta may be +infinity (then 1).  Requires w > 0.
double thermal_covariance(double beta, double omega);

// Gaussian state over the reservoir modes, diagonal covariance:
//   <W(f)> = exp(-1/4 <f, C f> + i Im<alpha, f>).
struct GaussianState {
  RealVector covariance;  // diagonal of C, each entry >= 1
  Vector displacement;    // alpha

  Index modes() const { return covariance.size(); }
  bool centered(double tol = 1e-14) const;
  void validate() const;

  static GaussianState vacuum(Index n_modes);
  static GaussianState thermal(const ReservoirSpec& r, double beta);
};

// <W(f)> in the given state.
Complex weyl_expectation(const GaussianState& state, const ModeFunction& f);

// Scalar in W(f) W(g) = phase * W(f + g): exp(-i/2 Im<f, g>).
Complex weyl_product_phase(const ModeFunction& f, const ModeFunction& g);

// Central two-point function <phi(f) phi(g)> for the state's covariance:
// 1/2 Re<f, C g> + i/2 Im<f, g>.
Complex two_point_function(const GaussianState& state, const ModeFunction& f,
                           const ModeFunction& g);

// Elementwise e^{i w_j t} f_j: free reservoir evolution of a mode function.
ModeFunction free_evolution(const ReservoirSpec& r, double t,
                            const ModeFunction& f);

// Elementwise E(t, w_j) g_j for the reservoir's own coupling vector.
ModeFunction drive_profile(const ReservoirSpec& r, double t);

// One term of the Heisenberg-evolved operator: the system block P_l A P_r,
// its scalar coefficient, and the Weyl argument it multiplies.
struct WeylTerm {
  Index level_left = 0;
  Index level_right = 0;
  Matrix block;
  Complex scalar;
  ModeFunction weyl_arg;
};

// Exact conjugation of A tensor W(h) by exp(it (H_R + lambda G phi(g))),
// expanded over the eigenlevel pairs of the coupling:
//   sum_{l,r} P_l A P_r (x) scalar_{lr} W(u_{lr}).
std::vector<WeylTerm> heisenberg_weyl_evolve(const SpectralDecomposition& dec,
                                             const Matrix& a,
                                             const ModeFunction& h, double t,
                                             double lambda,
                                             const ReservoirSpec& r);

// |<W(u_{lr})>| for u_{lr} = lambda (gamma_l - gamma_r) E(t, .) g: the
// decay factor multiplying the (l, r) coherence block.
double coherence_decay_magnitude(const SpectralDecomposition& dec, Index l,
                                 Index r, double t, double lambda,
                                 const ReservoirSpec& r_spec,
                                 const GaussianState& state);

// Closed-form reduced state at time t when [H_S, G] = 0 (throws otherwise):
// every coherence block between coupling levels picks up a Gaussian decay
// factor and a deterministic phase on top of the free system evolution.
DensityMatrix dephasing_reduced_state(const SystemSpec& sys,
                                      const DensityMatrix& rho_s,
                                      const ReservoirSpec& r, double lambda,
                                      double t, const GaussianState& state);

// Continuum dephasing factor for a two-level frequency splitting delta:
//   D(t) = exp(-4 lambda1^2 delta^2
//              int_0^cutoff J(w) coth(beta w / 2) sin^2(wt/2) / w^2 dw)
// evaluated by adaptive quadrature (absolute tolerance 1e-10).  Densities
// whose thermal integrand grows faster than w^{-0.95} toward w = 0 are
// rejected as infrared-divergent.
double decoherence_function(double beta, double lambda1, double delta,
                            const SpectralDensity& j, double t);

// <phi(f_1) ... phi(f_m)> for a centered state: sum over perfect pairings
// of ordered two-point functions.  Odd m gives 0; m is capped at 16.
Complex wick_moments(const GaussianState& state,
                     const std::vector<ModeFunction>& fs);

// Growth bound B_n on the n-th moment of the driven field along the
// coupling vector over the window [0, t]:
//   even n: (n-1)!! C_p^{n/2}, odd n: sqrt(B_{n-1} B_{n+1}),
// with C_p the peak two-point magnitude over time pairs in the window.
double regularity_bound(const GaussianState& state, const ReservoirSpec& r,
                        double t, int n);

}  // namespace zeno
