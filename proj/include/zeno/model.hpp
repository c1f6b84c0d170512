#pragma once

// System/reservoir model building: discretized bosonic reservoirs, field
// operators on truncated Fock space, full Hamiltonians, spectral
// decompositions of coupling operators, the Zeno Hamiltonian and the
// nonselective measurement map, and many-body composite couplings.

#include <cstdint>
#include <vector>

#include "zeno/linalg.hpp"

namespace zeno {

// Continuum spectral density J(ω) on [0, cutoff]; the discretization target.
// flat:  J(ω) = amplitude
// ohmic: J(ω) = amplitude · ω · e^{−ω/omega_c}
struct SpectralDensity {
  enum class Family { flat, ohmic };
  Family family = Family::flat;
  double amplitude = 1.0;
  double cutoff = 1.0;    // upper integration limit ω_max
  double omega_c = 1.0;   // ohmic decay scale
  double operator()(double omega) const;
  void validate() const;  // throws validation_error
};

// Discretized reservoir: M modes with frequencies ω_j, coupling amplitudes
// g_j, and a per-mode Fock truncation keeping levels 0..n_max.
struct ReservoirSpec {
  RealVector frequencies;
  Vector couplings;
  Index n_max = 1;
  SpectralDensity density;

  Index modes() const { return frequencies.size(); }
  Index local_dim() const { return n_max + 1; }
  Index fock_dim() const;  // (n_max+1)^M, throws if it would overflow
  void validate() const;
};

// Finite system with its Hamiltonian and the reservoir coupling operator.
struct SystemSpec {
  SystemSpec(HermitianMatrix h, HermitianMatrix g);
  Index dim() const { return h_sys.dim(); }
  HermitianMatrix h_sys;
  HermitianMatrix coupling;
};

// Distinct eigenvalues (strictly increasing) with orthogonal projections
// summing to the identity; ranks[l] = tr P_l.
struct SpectralDecomposition {
  std::vector<double> eigenvalues;
  std::vector<Matrix> projections;
  std::vector<Index> ranks;
  Index dim() const { return projections.empty() ? 0 : projections[0].rows(); }
  Index size() const { return static_cast<Index>(eigenvalues.size()); }
};

// Many-body coupling G = F(G_1, …, G_N) with each site operator acting on
// its own tensor factor.  With mu > 0 every site operator is perturbed by
// mu times an independent real-symmetric matrix of standard normals drawn
// from the seed, which makes all combined eigenvalues simple almost surely.
struct CompositeCoupling {
  enum class Combine { sum, product };
  std::vector<HermitianMatrix> site_ops;
  Combine combine = Combine::sum;
  double mu = 0.0;
  std::uint64_t seed = 0;
};

inline constexpr double kClusterTol = 1e-9;  // eigenvalue merge tolerance

// Gauss–Legendre nodes (ascending) and weights on [a, b], Golub–Welsch.
std::pair<RealVector, RealVector> gauss_legendre(Index m, double a, double b);

// Reservoir with frequencies at the Gauss–Legendre nodes of [0, cutoff] and
// |g_j|² = J(ω_j)·w_j, so mode sums approximate ∫ J(ω) · f(ω) dω.
ReservoirSpec discretize_reservoir(const SpectralDensity& family, Index m,
                                   Index n_max);

// Lowering operator truncated to levels 0..n_levels-1 (single mode).
Matrix fock_annihilation(Index n_levels);

// Lowering operator of mode j embedded in the joint Fock space of r.
Matrix mode_lowering(const ReservoirSpec& r, Index j);

// φ(c) = (1/√2) Σ_j (c_j a_j† + conj(c_j) a_j) on the joint Fock space.
HermitianMatrix field_operator(const ReservoirSpec& r, const Vector& coeffs);

// Σ_j ω_j a_j† a_j (diagonal in the Fock basis).
HermitianMatrix reservoir_hamiltonian(const ReservoirSpec& r);

// H = H_S⊗I + I⊗H_R + λ G⊗φ(g) in the fixed (system, reservoir) order.
HermitianMatrix assemble_hamiltonian(const SystemSpec& sys,
                                     const ReservoirSpec& r, double lambda);

// Eigenvalues within cluster_tol of their neighbour merge into one level
// whose projection sums the corresponding eigenvector outer products.
SpectralDecomposition spectral_decompose(const HermitianMatrix& g,
                                         double cluster_tol = kClusterTol);

// H_Z = Σ_l P_l H_S P_l; block diagonal in the eigenbasis of the coupling.
HermitianMatrix zeno_hamiltonian(const HermitianMatrix& h_sys,
                                 const SpectralDecomposition& dec);

// Nonselective measurement ρ ↦ Σ_l P_l ρ P_l.
DensityMatrix measure(const DensityMatrix& rho,
                      const SpectralDecomposition& dec);

// Σ_l P_l A P_l for an observable; commutes with the measured operator.
HermitianMatrix project_coupling(const HermitianMatrix& a,
                                 const SpectralDecomposition& dec);

// Builds F(G_1,…,G_N) on the full tensor space (see CompositeCoupling).
HermitianMatrix composite_coupling(const CompositeCoupling& c);

}  // namespace zeno
