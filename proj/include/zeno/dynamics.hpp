#pragma once

// Numerically exact joint dynamics on truncated Fock spaces and the
// strong-coupling reference it is compared against: thermal reservoir
// states, unitary propagation by dense eigendecomposition, reduction to
// the system, the measure-then-rotate limit state, and the coupling
// sweep that tracks convergence toward it with adaptive truncation.

#include <vector>

#include "zeno/analysis.hpp"
#include "zeno/gaussian.hpp"
#include "zeno/linalg.hpp"
#include "zeno/model.hpp"

namespace zeno {

// Largest joint (system x reservoir) dimension the sweep will build.
inline constexpr Index kJointDimCap = 4096;

// A run is flagged when the top Fock level of any mode carries at least
// this much population; below it the truncation is accepted as clean.
inline constexpr double kTopPopulationTol = 1e-4;

// Gibbs state e^{-beta H_R}/Z on the truncated Fock space, diagonal in the
// occupation basis; beta = +infinity gives the vacuum projector.
DensityMatrix initial_reservoir_state(const ReservoirSpec& r, double beta);

// e^{-itH} rho0 e^{itH} by Hermitian eigendecomposition.
DensityMatrix evolve_exact(const HermitianMatrix& h, const DensityMatrix& rho0,
                           double t);

// Partial trace of a (system, environment) state down to the system factor.
DensityMatrix reduced_state(const DensityMatrix& rho_joint, Index sys_dim);

// The strong-coupling limit of the reduced dynamics: nonselective
// measurement of the coupling followed by rotation under the projected
// Hamiltonian, e^{-itH_Z} (sum_l P_l rho P_l) e^{itH_Z}.
DensityMatrix zeno_reference(const DensityMatrix& rho_s,
                             const HermitianMatrix& h_sys,
                             const SpectralDecomposition& dec, double t);

// Total population of joint basis states in which at least one mode sits
// at its highest retained Fock level; the truncation-quality indicator.
double top_fock_population(const DensityMatrix& rho_joint, Index sys_dim,
                           const ReservoirSpec& r);

struct SweepRecord {
  double lambda;
  double t;
  DensityMatrix rho_reduced;     // exact reduced state at (lambda, t)
  DensityMatrix rho_zeno;        // measure-then-rotate reference at t
  double trace_distance;         // between the two states above
  double fidelity;
  double top_fock_population;    // at the final truncation used
  Index n_max_used;
  bool truncation_ok;            // top population below kTopPopulationTol
  double wall_time_ms;
};

// Exact joint evolution of rho_s (x) Gibbs(beta) for each coupling value,
// compared against the fixed measure-then-rotate reference.  When
// adapt_truncation is set and the top Fock level carries too much weight,
// n_max grows and the run repeats until clean or the joint dimension would
// pass kJointDimCap; the grown truncation carries over to later values.
std::vector<SweepRecord> lambda_sweep(const SystemSpec& sys,
                                      const ReservoirSpec& r,
                                      const DensityMatrix& rho_s, double beta,
                                      double t,
                                      const std::vector<double>& lambda_grid,
                                      bool adapt_truncation = true);

// Limit dynamics of a system coupled to two reservoirs when the second
// coupling dominates: the second reservoir acts as a nonselective
// measurement of its coupling operator (projections in dec2), and the
// remaining system + first-reservoir Hamiltonian is projected onto the
// measured blocks,
//   H_Z = sum_l (P_l x I) (H_S + H_R1 + lambda1 G1 phi(g1)) (P_l x I).
// rho_joint lives on (system, reservoir 1); the measurement is applied to
// it before the rotation.  Returns the evolved joint state.
DensityMatrix two_reservoir_zeno_evolve(const SystemSpec& sys,
                                        const ReservoirSpec& r1,
                                        const SpectralDecomposition& dec2,
                                        double lambda1,
                                        const DensityMatrix& rho_joint,
                                        double t);

}  // namespace zeno
