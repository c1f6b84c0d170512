#include "zeno/dynamics.hpp"

#include <chrono>
#include <cmath>
#include <optional>
#include <utility>

namespace zeno {

namespace {

// Occupation energy of joint Fock index f; the last mode is the fastest
// digit, matching the mode_lowering embedding.
double fock_energy(const ReservoirSpec& r, Index f) {
  const Index base = r.local_dim();
  double e = 0.0;
  Index rest = f;
  for (Index j = r.modes() - 1; j >= 0; --j) {
    e += r.frequencies[j] * static_cast<double>(rest % base);
    rest /= base;
  }
  return e;
}

bool touches_top_level(const ReservoirSpec& r, Index f) {
  const Index base = r.local_dim();
  Index rest = f;
  for (Index j = 0; j < r.modes(); ++j) {
    if (rest % base == r.n_max) return true;
    rest /= base;
  }
  return false;
}

double joint_dim_estimate(Index sys_dim, Index local_dim, Index modes) {
  return static_cast<double>(sys_dim) *
         std::pow(static_cast<double>(local_dim), static_cast<double>(modes));
}

}  // namespace

DensityMatrix initial_reservoir_state(const ReservoirSpec& r, double beta) {
  r.validate();
  if (std::isnan(beta) || beta <= 0.0)
    throw validation_error(
        "inverse temperature must be positive (or infinite for the vacuum)");
  const Index fd = r.fock_dim();
  Matrix rho = Matrix::Zero(fd, fd);
  if (std::isinf(beta)) {
    rho(0, 0) = 1.0;
    return DensityMatrix(std::move(rho));
  }
  RealVector w(fd);
  for (Index f = 0; f < fd; ++f) w[f] = std::exp(-beta * fock_energy(r, f));
  w /= w.sum();
  for (Index f = 0; f < fd; ++f) rho(f, f) = w[f];
  return DensityMatrix(std::move(rho));
}

DensityMatrix evolve_exact(const HermitianMatrix& h, const DensityMatrix& rho0,
                           double t) {
  if (h.dim() != rho0.dim())
    throw validation_error("hamiltonian and state dimensions differ");
  const Matrix u = expm_i_hermitian(h, t);
  return DensityMatrix(u * rho0.mat() * u.adjoint());
}

DensityMatrix reduced_state(const DensityMatrix& rho_joint, Index sys_dim) {
  if (sys_dim < 1 || rho_joint.dim() % sys_dim != 0)
    throw validation_error(
        "system dimension does not divide the joint dimension");
  const Index env = rho_joint.dim() / sys_dim;
  return partial_trace(rho_joint, {sys_dim, env}, {0});
}

DensityMatrix zeno_reference(const DensityMatrix& rho_s,
                             const HermitianMatrix& h_sys,
                             const SpectralDecomposition& dec, double t) {
  if (h_sys.dim() != rho_s.dim() || dec.dim() != rho_s.dim())
    throw validation_error("state, hamiltonian and decomposition dimensions "
                           "differ");
  const Matrix u = expm_i_hermitian(zeno_hamiltonian(h_sys, dec), t);
  const DensityMatrix measured = measure(rho_s, dec);
  return DensityMatrix(u * measured.mat() * u.adjoint());
}

double top_fock_population(const DensityMatrix& rho_joint, Index sys_dim,
                           const ReservoirSpec& r) {
  const Index fd = r.fock_dim();
  if (sys_dim < 1 || rho_joint.dim() != sys_dim * fd)
    throw validation_error(
        "joint state dimension does not match system x reservoir");
  double p = 0.0;
  for (Index f = 0; f < fd; ++f) {
    if (!touches_top_level(r, f)) continue;
    for (Index s = 0; s < sys_dim; ++s)
      p += rho_joint.mat()(s * fd + f, s * fd + f).real();
  }
  return p;
}

std::vector<SweepRecord> lambda_sweep(const SystemSpec& sys,
                                      const ReservoirSpec& r,
                                      const DensityMatrix& rho_s, double beta,
                                      double t,
                                      const std::vector<double>& lambda_grid,
                                      bool adapt_truncation) {
  r.validate();
  if (rho_s.dim() != sys.dim())
    throw validation_error("initial system state dimension mismatch");
  if (lambda_grid.empty()) throw validation_error("coupling grid is empty");
  if (joint_dim_estimate(sys.dim(), r.local_dim(), r.modes()) >
      static_cast<double>(kJointDimCap))
    throw validation_error(
        "joint dimension exceeds the cap; lower n_max or the mode count");

  const Index ds = sys.dim();
  const SpectralDecomposition dec = spectral_decompose(sys.coupling);
  const DensityMatrix rho_zeno = zeno_reference(rho_s, sys.h_sys, dec, t);

  ReservoirSpec cur = r;
  std::vector<SweepRecord> records;
  records.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) {
    const auto start = std::chrono::steady_clock::now();
    std::optional<DensityMatrix> evolved;
    double p_top = 0.0;
    for (;;) {
      const HermitianMatrix h = assemble_hamiltonian(sys, cur, lambda);
      const DensityMatrix rho0 = DensityMatrix(
          kron(rho_s.mat(), initial_reservoir_state(cur, beta).mat()));
      evolved = evolve_exact(h, rho0, t);
      p_top = top_fock_population(*evolved, ds, cur);
      if (!adapt_truncation || p_top < kTopPopulationTol) break;
      if (joint_dim_estimate(ds, cur.local_dim() + 1, cur.modes()) >
          static_cast<double>(kJointDimCap))
        break;  // cap reached; keep the flagged result
      cur.n_max += 1;
    }
    const auto stop = std::chrono::steady_clock::now();
    const double wall_ms =
        std::chrono::duration<double, std::milli>(stop - start).count();
    const DensityMatrix rho_red = reduced_state(*evolved, ds);
    records.push_back(SweepRecord{lambda, t, rho_red, rho_zeno,
                                  trace_distance(rho_red, rho_zeno),
                                  fidelity(rho_red, rho_zeno), p_top,
                                  cur.n_max, p_top < kTopPopulationTol,
                                  wall_ms});
  }
  return records;
}

DensityMatrix two_reservoir_zeno_evolve(const SystemSpec& sys,
                                        const ReservoirSpec& r1,
                                        const SpectralDecomposition& dec2,
                                        double lambda1,
                                        const DensityMatrix& rho_joint,
                                        double t) {
  r1.validate();
  const Index ds = sys.dim();
  if (dec2.dim() != ds)
    throw validation_error(
        "measured coupling decomposition does not match the system");
  const Index fd = r1.fock_dim();
  if (rho_joint.dim() != ds * fd)
    throw validation_error(
        "joint state dimension does not match system x reservoir");

  const Matrix h1 = assemble_hamiltonian(sys, r1, lambda1).mat();
  const Matrix eye = Matrix::Identity(fd, fd);
  Matrix hz = Matrix::Zero(ds * fd, ds * fd);
  Matrix measured = Matrix::Zero(ds * fd, ds * fd);
  for (const Matrix& p : dec2.projections) {
    const Matrix pe = kron(p, eye);
    hz += pe * h1 * pe;
    measured += pe * rho_joint.mat() * pe;
  }
  const Matrix u = expm_i_hermitian(HermitianMatrix(std::move(hz)), t);
  return DensityMatrix(u * measured * u.adjoint());
}

}  // namespace zeno
