#include "zeno/gaussian.hpp"

#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace zeno {

namespace {

constexpr double kOmegaZeroTol = 1e-13;  // treat the mode as static below this
constexpr double kSeriesCut = 1e-4;      // pinned series fallback for E
constexpr double kLagSeriesCut = 0.5;    // series region for Psi

}  // namespace

Complex drive_kernel(double t, double omega) {
  if (std::abs(omega) < kOmegaZeroTol) return Complex(t, 0.0);
  const double x = omega * t;
  if (std::abs(x) < kSeriesCut) {
    // t * sum_k (ix)^k / (k+1)!
    const Complex ix(0.0, x);
    Complex sum(1.0, 0.0);
    Complex term(1.0, 0.0);
    for (int k = 1; k <= 4; ++k) {
      term *= ix / static_cast<double>(k + 1);
      sum += term;
    }
    return t * sum;
  }
  // (e^{ix} - 1) / (i omega) = t sinc(x/2) e^{ix/2}, cancellation-free.
  const double half = 0.5 * x;
  return t * (std::sin(half) / half) * std::polar(1.0, half);
}

double phase_lag_kernel(double t, double omega) {
  if (std::abs(omega) < kOmegaZeroTol) return 0.0;
  const double x = omega * t;
  if (std::abs(x) < kLagSeriesCut) {
    // (x - sin x) / w^2 = (w t^3 / 6) (1 - x^2/20 + x^4/840 - ...), which
    // sidesteps the catastrophic cancellation of the closed form near 0.
    const double x2 = x * x;
    const double series =
        1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0 * (1.0 - x2 / 110.0)));
    return omega * t * t * t / 6.0 * series;
  }
  return (x - std::sin(x)) / (omega * omega);
}

double thermal_covariance(double beta, double omega) {
  if (!(beta > 0.0)) throw validation_error("inverse temperature must be > 0");
  if (!(omega > 0.0))
    throw validation_error("thermal covariance needs omega > 0");
  if (std::isinf(beta)) return 1.0;
  return 1.0 / std::tanh(0.5 * beta * omega);
}

bool GaussianState::centered(double tol) const {
  return displacement.size() == 0 ||
         displacement.cwiseAbs().maxCoeff() <= tol;
}

void GaussianState::validate() const {
  if (covariance.size() != displacement.size())
    throw validation_error("covariance and displacement sizes differ");
  if (covariance.size() == 0)
    throw validation_error("gaussian state needs at least one mode");
  for (Index j = 0; j < covariance.size(); ++j) {
    if (!std::isfinite(covariance[j]) || covariance[j] < 1.0 - 1e-12)
      throw validation_error("covariance entries must be finite and >= 1");
    if (!std::isfinite(std::abs(displacement[j])))
      throw validation_error("displacement entries must be finite");
  }
}

GaussianState GaussianState::vacuum(Index n_modes) {
  GaussianState s;
  s.covariance = RealVector::Ones(n_modes);
  s.displacement = Vector::Zero(n_modes);
  s.validate();
  return s;
}

GaussianState GaussianState::thermal(const ReservoirSpec& r, double beta) {
  r.validate();
  GaussianState s;
  s.covariance = RealVector(r.modes());
  for (Index j = 0; j < r.modes(); ++j)
    s.covariance[j] = thermal_covariance(beta, r.frequencies[j]);
  s.displacement = Vector::Zero(r.modes());
  s.validate();
  return s;
}

namespace {

void require_modes(const GaussianState& state, const ModeFunction& f) {
  state.validate();
  if (f.size() != state.modes())
    throw validation_error("mode function size does not match the state");
}

}  // namespace

Complex weyl_expectation(const GaussianState& state, const ModeFunction& f) {
  require_modes(state, f);
  double quad = 0.0;
  for (Index j = 0; j < f.size(); ++j)
    quad += state.covariance[j] * std::norm(f[j]);
  const double phase = std::imag(state.displacement.dot(f));
  return std::exp(Complex(-0.25 * quad, phase));
}

Complex weyl_product_phase(const ModeFunction& f, const ModeFunction& g) {
  if (f.size() != g.size())
    throw validation_error("mode function sizes differ");
  return std::exp(Complex(0.0, -0.5 * std::imag(f.dot(g))));
}

Complex two_point_function(const GaussianState& state, const ModeFunction& f,
                           const ModeFunction& g) {
  require_modes(state, f);
  require_modes(state, g);
  Complex cov(0.0, 0.0);
  for (Index j = 0; j < f.size(); ++j)
    cov += state.covariance[j] * std::conj(f[j]) * g[j];
  return Complex(0.5 * cov.real(), 0.5 * std::imag(f.dot(g)));
}

ModeFunction free_evolution(const ReservoirSpec& r, double t,
                            const ModeFunction& f) {
  if (f.size() != r.modes())
    throw validation_error("mode function size does not match the reservoir");
  ModeFunction out(f.size());
  for (Index j = 0; j < f.size(); ++j)
    out[j] = std::polar(1.0, r.frequencies[j] * t) * f[j];
  return out;
}

ModeFunction drive_profile(const ReservoirSpec& r, double t) {
  ModeFunction out(r.modes());
  for (Index j = 0; j < r.modes(); ++j)
    out[j] = drive_kernel(t, r.frequencies[j]) * r.couplings[j];
  return out;
}

namespace {

// sum_j |g_j|^2 Psi(t, w_j), the accumulated phase lag of the drive.
double phase_lag_sum(const ReservoirSpec& r, double t) {
  double sum = 0.0;
  for (Index j = 0; j < r.modes(); ++j)
    sum += std::norm(r.couplings[j]) * phase_lag_kernel(t, r.frequencies[j]);
  return sum;
}

}  // namespace

std::vector<WeylTerm> heisenberg_weyl_evolve(const SpectralDecomposition& dec,
                                             const Matrix& a,
                                             const ModeFunction& h, double t,
                                             double lambda,
                                             const ReservoirSpec& r) {
  r.validate();
  if (dec.size() == 0) throw validation_error("empty spectral decomposition");
  if (a.rows() != dec.dim() || a.cols() != dec.dim())
    throw validation_error("operator dimension does not match decomposition");
  if (h.size() != r.modes())
    throw validation_error("mode function size does not match the reservoir");

  const double lag = phase_lag_sum(r, t);
  const ModeFunction h_t = free_evolution(r, t, h);
  const ModeFunction eg = drive_profile(r, t);
  // Im<g, E h> drives the mixed phase between coupling and witness modes.
  Vector eh(h.size());
  for (Index j = 0; j < h.size(); ++j)
    eh[j] = drive_kernel(t, r.frequencies[j]) * h[j];
  const double im_geh = std::imag(r.couplings.dot(eh));

  std::vector<WeylTerm> terms;
  terms.reserve(static_cast<std::size_t>(dec.size()) * dec.size());
  for (Index l = 0; l < dec.size(); ++l) {
    for (Index rr = 0; rr < dec.size(); ++rr) {
      const double gl = dec.eigenvalues[l];
      const double gr = dec.eigenvalues[rr];
      WeylTerm term;
      term.level_left = l;
      term.level_right = rr;
      term.block = dec.projections[l] * a * dec.projections[rr];
      const double phase = -0.5 * lambda * lambda * (gl * gl - gr * gr) * lag -
                           0.5 * lambda * (gl + gr) * im_geh;
      term.scalar = std::exp(Complex(0.0, phase));
      term.weyl_arg = lambda * (gl - gr) * eg + h_t;
      terms.push_back(std::move(term));
    }
  }
  return terms;
}

double coherence_decay_magnitude(const SpectralDecomposition& dec, Index l,
                                 Index r, double t, double lambda,
                                 const ReservoirSpec& r_spec,
                                 const GaussianState& state) {
  if (l < 0 || l >= dec.size() || r < 0 || r >= dec.size())
    throw validation_error("coupling level index out of range");
  const ModeFunction u =
      lambda * (dec.eigenvalues[l] - dec.eigenvalues[r]) *
      drive_profile(r_spec, t);
  return std::abs(weyl_expectation(state, u));
}

DensityMatrix dephasing_reduced_state(const SystemSpec& sys,
                                      const DensityMatrix& rho_s,
                                      const ReservoirSpec& r, double lambda,
                                      double t, const GaussianState& state) {
  r.validate();
  if (rho_s.dim() != sys.dim())
    throw validation_error("state dimension does not match the system");
  if (state.modes() != r.modes())
    throw validation_error("gaussian state does not match the reservoir");
  const Matrix& hs = sys.h_sys.mat();
  const Matrix& g = sys.coupling.mat();
  const double comm_scale =
      1.0 + hs.cwiseAbs().maxCoeff() * g.cwiseAbs().maxCoeff();
  if ((hs * g - g * hs).cwiseAbs().maxCoeff() > 1e-12 * comm_scale)
    throw validation_error(
        "closed-form dephasing requires a coupling that commutes with the "
        "system Hamiltonian");

  const SpectralDecomposition dec = spectral_decompose(sys.coupling);
  const Matrix u_free = expm_i_hermitian(sys.h_sys, t);
  const Matrix rho_free = u_free * rho_s.mat() * u_free.adjoint();
  const double lag = phase_lag_sum(r, t);
  const ModeFunction eg = drive_profile(r, t);

  Matrix out = Matrix::Zero(sys.dim(), sys.dim());
  for (Index l = 0; l < dec.size(); ++l) {
    for (Index rr = 0; rr < dec.size(); ++rr) {
      const double gl = dec.eigenvalues[l];
      const double gr = dec.eigenvalues[rr];
      const Complex phase =
          std::exp(Complex(0.0, 0.5 * lambda * lambda * (gl * gl - gr * gr) * lag));
      const Complex decay =
          weyl_expectation(state, lambda * (gr - gl) * eg);
      out += phase * decay *
             (dec.projections[l] * rho_free * dec.projections[rr]);
    }
  }
  return DensityMatrix(out);
}

double decoherence_function(double beta, double lambda1, double delta,
                            const SpectralDensity& j, double t) {
  j.validate();
  if (!(beta > 0.0)) throw validation_error("inverse temperature must be > 0");
  if (!std::isfinite(lambda1) || !std::isfinite(delta) || !std::isfinite(t))
    throw validation_error("decoherence parameters must be finite");
  if (t == 0.0) return 1.0;

  const auto integrand = [&](double w) {
    const double s = std::sin(0.5 * w * t) / w;
    return j(w) * thermal_covariance(beta, w) * s * s;
  };

  // Infrared guard: sample toward w = 0 and reject growth beyond w^{-0.95}
  // per decade, which would make the integral diverge.
  const double allowed = std::pow(10.0, 0.95);
  double prev = integrand(j.cutoff * 1e-3);
  for (int k = 4; k <= 8; ++k) {
    const double cur = integrand(j.cutoff * std::pow(10.0, -k));
    if (prev > 1e-300 && cur > prev * allowed * (1.0 + 1e-9))
      throw validation_error(
          "thermal integrand is infrared-divergent for this spectral density");
    prev = cur;
  }

  double err = 0.0;
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          integrand, 0.0, j.cutoff, 15, 1e-12, &err);
  if (!(err <= 1e-10 * (1.0 + std::abs(integral))))
    throw std::runtime_error("decoherence quadrature did not converge");
  return std::exp(-4.0 * lambda1 * lambda1 * delta * delta * integral);
}

namespace {

Complex pairing_sum(const std::vector<ModeFunction>& fs,
                    const std::vector<std::vector<Complex>>& tp,
                    std::vector<bool>& used) {
  std::size_t first = used.size();
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (!used[i]) {
      first = i;
      break;
    }
  }
  if (first == used.size()) return Complex(1.0, 0.0);
  used[first] = true;
  Complex sum(0.0, 0.0);
  for (std::size_t j = first + 1; j < used.size(); ++j) {
    if (used[j]) continue;
    used[j] = true;
    sum += tp[first][j] * pairing_sum(fs, tp, used);
    used[j] = false;
  }
  used[first] = false;
  return sum;
}

}  // namespace

Complex wick_moments(const GaussianState& state,
                     const std::vector<ModeFunction>& fs) {
  state.validate();
  if (!state.centered())
    throw validation_error("moment expansion needs a centered state");
  const std::size_t m = fs.size();
  if (m > 16) throw validation_error("moment order is capped at 16 factors");
  if (m == 0) return Complex(1.0, 0.0);
  if (m % 2 == 1) return Complex(0.0, 0.0);
  for (const ModeFunction& f : fs) require_modes(state, f);

  std::vector<std::vector<Complex>> tp(m, std::vector<Complex>(m));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      tp[i][j] = two_point_function(state, fs[i], fs[j]);

  std::vector<bool> used(m, false);
  return pairing_sum(fs, tp, used);
}

double regularity_bound(const GaussianState& state, const ReservoirSpec& r,
                        double t, int n) {
  r.validate();
  if (state.modes() != r.modes())
    throw validation_error("gaussian state does not match the reservoir");
  if (n < 1 || n > 100) throw validation_error("moment order out of range");
  if (!(t > 0.0)) throw validation_error("time window must be positive");

  // Peak magnitude of the two-point function between time-shifted copies of
  // the coupling vector; it depends only on the shift difference, scanned
  // here on a dense grid over [0, t].
  const ModeFunction g = r.couplings;
  double peak = 0.0;
  const int grid = 2048;
  for (int k = 0; k <= grid; ++k) {
    const double tau = t * static_cast<double>(k) / grid;
    peak = std::max(
        peak, std::abs(two_point_function(state, g, free_evolution(r, tau, g))));
  }

  const auto even_bound = [&](int m) {
    double df = 1.0;
    for (int k = m - 1; k >= 1; k -= 2) df *= static_cast<double>(k);
    return df * std::pow(peak, m / 2.0);
  };
  if (n % 2 == 0) return even_bound(n);
  return std::sqrt(even_bound(n - 1) * even_bound(n + 1));
}

}  // namespace zeno
