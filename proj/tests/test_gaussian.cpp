#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "doctest.h"
#include "zeno/gaussian.hpp"
#include "zeno/linalg.hpp"
#include "zeno/model.hpp"
#include "zeno/random.hpp"

namespace {

using namespace zeno;
using namespace std::complex_literals;

constexpr double kInf = std::numeric_limits<double>::infinity();

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

ReservoirSpec one_mode(double omega, Complex g, Index n_max) {
  ReservoirSpec r;
  r.frequencies = RealVector::Constant(1, omega);
  r.couplings = Vector::Constant(1, g);
  r.n_max = n_max;
  return r;
}

// e^{i phi(f)} on the truncated joint Fock space.
Matrix fock_weyl(const ReservoirSpec& r, const Vector& f) {
  return expm_i_hermitian(field_operator(r, f), -1.0);
}

// Normalized Gibbs state of the free reservoir; beta = inf gives the vacuum.
Matrix fock_gibbs(const ReservoirSpec& r, double beta) {
  const Matrix h = reservoir_hamiltonian(r).mat();
  const Index d = h.rows();
  Vector diag(d);
  if (std::isinf(beta)) {
    diag.setZero();
    diag[0] = 1.0;
  } else {
    for (Index k = 0; k < d; ++k)
      diag[k] = std::exp(-beta * h(k, k).real());
    diag /= diag.sum();
  }
  return diag.asDiagonal();
}

// Simpson rule for the kernel quadrature oracles.
template <typename F>
auto simpson(F f, double a, double b, int n) {
  auto sum = f(a) + f(b);
  const double h = (b - a) / n;
  for (int k = 1; k < n; ++k) sum += f(a + k * h) * (k % 2 ? 4.0 : 2.0);
  return sum * (h / 3.0);
}

}  // namespace

TEST_SUITE("gaussian") {

TEST_CASE("drive kernel static and small arguments") {
  CHECK(drive_kernel(0.5, 0.0) == Complex(0.5, 0.0));
  CHECK(drive_kernel(0.5, 5e-14) == Complex(0.5, 0.0));
  CHECK(drive_kernel(0.0, 2.0) == Complex(0.0, 0.0));

  const Complex e1 = drive_kernel(1.3, 0.7);
  CHECK(std::abs(e1.real() - 1.1278624852713577) < 2e-15);
  CHECK(std::abs(e1.imag() - 0.5517917864445547) < 2e-15);

  const Complex e2 = drive_kernel(2.0, 1e-6);
  CHECK(std::abs(e2.real() - 1.9999999999986666667) < 1e-14);
  CHECK(std::abs(e2.imag() - 1.9999999999993332428e-6) < 1e-20);
}

TEST_CASE("drive kernel equals the time integral of the mode phase") {
  for (auto [t, w] : {std::pair{0.9, 2.3}, std::pair{3.0, 0.31}}) {
    const Complex direct = drive_kernel(t, w);
    const Complex quad =
        simpson([w](double s) { return std::polar(1.0, w * s); }, 0.0, t,
                20000);
    CHECK(std::abs(direct - quad) < 1e-12);
  }
}

TEST_CASE("drive kernel series branch agrees with the closed form") {
  // Just below the series cutoff the half-angle closed form is still
  // perfectly conditioned, so both evaluations must coincide.
  const double t = 1.0;
  for (double w : {0.2e-4, 0.6e-4, 0.99999e-4}) {
    const double x = w * t;
    const Complex closed =
        t * (std::sin(0.5 * x) / (0.5 * x)) * std::polar(1.0, 0.5 * x);
    CHECK(std::abs(drive_kernel(t, w) - closed) < 1e-15);
  }
}

TEST_CASE("phase lag kernel static and frozen values") {
  CHECK(phase_lag_kernel(1.7, 0.0) == 0.0);
  CHECK(phase_lag_kernel(1.7, 5e-14) == 0.0);
  CHECK(phase_lag_kernel(0.0, 2.0) == 0.0);

  CHECK(phase_lag_kernel(1.3, 0.7) ==
        doctest::Approx(0.24591073532663181249).epsilon(1e-14));
  CHECK(phase_lag_kernel(2.0, 1e-6) ==
        doctest::Approx(1.3333333333330666667e-6).epsilon(1e-13));
  // Small-argument pocket where the closed form would lose digits.
  CHECK(phase_lag_kernel(1.0, 1e-3) ==
        doctest::Approx(0.00016666665833333353175).epsilon(1e-13));
  CHECK(phase_lag_kernel(0.9, 0.45) ==
        doctest::Approx(0.054228343847997872997).epsilon(1e-14));
}

TEST_CASE("phase lag kernel equals its defining double integral") {
  for (auto [t, w] : {std::pair{1.1, 0.8}, std::pair{2.3, 1.9}}) {
    const double direct = phase_lag_kernel(t, w);
    const double quad = simpson(
        [w](double s) { return (1.0 - std::cos(w * s)) / w; }, 0.0, t, 20000);
    CHECK(std::abs(direct - quad) < 1e-12);
  }
  // Just below the series cutoff the closed form has only mild
  // cancellation, so the two branches must agree to near machine accuracy.
  for (double w : {0.3, 0.45, 0.499999}) {
    const double x = w * 1.0;
    const double closed = (x - std::sin(x)) / (w * w);
    CHECK(std::abs(phase_lag_kernel(1.0, w) - closed) < 1e-11 * closed + 1e-16);
  }
}

TEST_CASE("thermal covariance") {
  CHECK(thermal_covariance(0.5, 1.0) ==
        doctest::Approx(4.082988165073597).epsilon(1e-15));
  CHECK(thermal_covariance(2.0, 1.0) ==
        doctest::Approx(1.3130352854993315).epsilon(1e-15));
  CHECK(thermal_covariance(kInf, 0.7) == 1.0);
  CHECK(thermal_covariance(100.0, 50.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(thermal_covariance(1.0, 0.3) > thermal_covariance(1.0, 0.6));
  CHECK_THROWS_AS(thermal_covariance(0.0, 1.0), validation_error);
  CHECK_THROWS_AS(thermal_covariance(1.0, 0.0), validation_error);
}

TEST_CASE("vacuum and thermal gaussian states") {
  const GaussianState vac = GaussianState::vacuum(3);
  CHECK(vac.covariance.isOnes());
  CHECK(vac.centered());

  const ReservoirSpec r = discretize_reservoir(SpectralDensity{}, 3, 2);
  const GaussianState th = GaussianState::thermal(r, 0.5);
  for (Index j = 0; j < 3; ++j)
    CHECK(th.covariance[j] ==
          doctest::Approx(thermal_covariance(0.5, r.frequencies[j]))
              .epsilon(1e-15));
  const GaussianState cold = GaussianState::thermal(r, kInf);
  CHECK(cold.covariance.isOnes());

  GaussianState bad = vac;
  bad.covariance[1] = 0.5;
  CHECK_THROWS_AS(bad.validate(), validation_error);
}

TEST_CASE("weyl expectation matches truncated fock traces") {
  const ReservoirSpec r = one_mode(0.9, 0.5, 60);

  // Vacuum.
  const GaussianState vac = GaussianState::vacuum(1);
  for (Complex f : {Complex(0.3, 0.0), Complex(0.4, -0.2), Complex(0.0, 1.1)}) {
    const Vector fv = Vector::Constant(1, f);
    const Complex direct = weyl_expectation(vac, fv);
    const Complex fock =
        (fock_gibbs(r, kInf) * fock_weyl(r, fv)).trace();
    CHECK(std::abs(direct - fock) < 1e-12);
    CHECK(std::abs(direct - std::exp(-0.25 * std::norm(f))) < 1e-12);
  }

  // Thermal.
  const GaussianState th = GaussianState::thermal(r, 1.0);
  const Vector fv = Vector::Constant(1, Complex(0.7, 0.2));
  const Complex fock = (fock_gibbs(r, 1.0) * fock_weyl(r, fv)).trace();
  CHECK(std::abs(weyl_expectation(th, fv) - fock) < 1e-10);

  // Displaced thermal: conjugating the Gibbs state by a Weyl operator
  // shifts the displacement parameter to the conjugating argument.
  const Vector dv = Vector::Constant(1, Complex(0.4, -0.3));
  const Matrix wd = fock_weyl(r, dv);
  const Matrix rho_d = wd * fock_gibbs(r, 1.0) * wd.adjoint();
  GaussianState disp = th;
  disp.displacement = dv;
  const Complex fock_d = (rho_d * fock_weyl(r, fv)).trace();
  CHECK(std::abs(weyl_expectation(disp, fv) - fock_d) < 1e-9);
}

TEST_CASE("weyl product phase reproduces the group law") {
  Vector f(2), g(2);
  f << Complex(0.3, 0.1), Complex(-0.2, 0.4);
  g << Complex(-0.1, 0.25), Complex(0.15, -0.3);

  const Complex ph = weyl_product_phase(f, g);
  CHECK(std::abs(std::abs(ph) - 1.0) < 1e-15);
  CHECK(std::abs(ph * weyl_product_phase(g, f) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(weyl_product_phase(f, f) - Complex(1.0, 0.0)) < 1e-15);
  CHECK(std::abs(ph - std::exp(Complex(0.0, -0.5 * std::imag(f.dot(g))))) <
        1e-15);

  // Operator check on the truncated Fock space, away from the top levels.
  const ReservoirSpec r = one_mode(1.1, 0.5, 30);
  const Vector f1 = Vector::Constant(1, Complex(0.3, 0.1));
  const Vector g1 = Vector::Constant(1, Complex(-0.2, 0.25));
  const Matrix lhs = fock_weyl(r, f1) * fock_weyl(r, g1);
  const Matrix rhs = weyl_product_phase(f1, g1) * fock_weyl(r, f1 + g1);
  CHECK(max_abs((lhs - rhs).topLeftCorner(31, 6)) < 1e-9);
}

TEST_CASE("two point function conventions against fock traces") {
  // Vacuum, two modes: <phi(f) phi(g)> = <f, g> / 2 and the truncation is
  // exact already at a handful of levels.
  ReservoirSpec r2;
  r2.frequencies = RealVector::Constant(2, 1.0);
  r2.couplings = Vector::Constant(2, 1.0);
  r2.n_max = 3;
  Vector f2(2), g2(2);
  f2 << Complex(0.7, 0.2), Complex(-0.3, 0.5);
  g2 << Complex(0.1, -0.6), Complex(0.8, 0.05);
  const GaussianState vac = GaussianState::vacuum(2);
  const Matrix phi_f = field_operator(r2, f2).mat();
  const Matrix phi_g = field_operator(r2, g2).mat();
  const Complex fock_vac =
      (fock_gibbs(r2, kInf) * phi_f * phi_g).trace();
  CHECK(std::abs(two_point_function(vac, f2, g2) - fock_vac) < 1e-13);
  CHECK(std::abs(two_point_function(vac, f2, g2) - 0.5 * f2.dot(g2)) < 1e-15);

  // Thermal, complex arguments with a nontrivial relative phase: only the
  // real part of <f, C g> enters the symmetric piece.
  const ReservoirSpec r1 = one_mode(0.9, 0.5, 60);
  const GaussianState th = GaussianState::thermal(r1, 1.0);
  const Vector ft = Vector::Constant(1, Complex(0.7, 0.2));
  const Vector gt = Vector::Constant(1, Complex(-0.3, 0.5));
  const Complex fock_th = (fock_gibbs(r1, 1.0) * field_operator(r1, ft).mat() *
                           field_operator(r1, gt).mat())
                              .trace();
  CHECK(std::abs(two_point_function(th, ft, gt) - fock_th) < 1e-10);

  // Exchange identities.
  const Complex tp_fg = two_point_function(th, ft, gt);
  const Complex tp_gf = two_point_function(th, gt, ft);
  CHECK(std::abs(tp_fg - std::conj(tp_gf)) < 1e-15);
  CHECK(std::abs((tp_fg - tp_gf) - Complex(0.0, std::imag(ft.dot(gt)))) <
        1e-15);
}

TEST_CASE("wick moments small orders") {
  const GaussianState vac = GaussianState::vacuum(2);
  Rng rng(211);

  CHECK(wick_moments(vac, {}) == Complex(1.0, 0.0));

  std::vector<ModeFunction> odd;
  for (int k = 0; k < 3; ++k) odd.push_back(rand_complex_matrix(rng, 2, 1));
  CHECK(wick_moments(vac, odd) == Complex(0.0, 0.0));

  std::vector<ModeFunction> pair;
  for (int k = 0; k < 2; ++k) pair.push_back(rand_complex_matrix(rng, 2, 1));
  CHECK(std::abs(wick_moments(vac, pair) -
                 two_point_function(vac, pair[0], pair[1])) < 1e-15);
}

TEST_CASE("wick moments match the explicit pairing lists") {
  GaussianState st;
  st.covariance = RealVector(2);
  st.covariance << 1.7, 2.4;
  st.displacement = Vector::Zero(2);
  Rng rng(223);
  std::vector<ModeFunction> fs;
  for (int k = 0; k < 6; ++k) fs.push_back(rand_complex_matrix(rng, 2, 1));

  const auto tp = [&](int i, int j) {
    return two_point_function(st, fs[i], fs[j]);
  };

  // Four factors: the three pairings written out by hand.
  const std::vector<ModeFunction> f4(fs.begin(), fs.begin() + 4);
  const Complex by_hand4 =
      tp(0, 1) * tp(2, 3) + tp(0, 2) * tp(1, 3) + tp(0, 3) * tp(1, 2);
  CHECK(std::abs(wick_moments(st, f4) - by_hand4) < 1e-14);

  // Six factors: all fifteen pairings enumerated explicitly.
  static const int pairings6[15][6] = {
      {0, 1, 2, 3, 4, 5}, {0, 1, 2, 4, 3, 5}, {0, 1, 2, 5, 3, 4},
      {0, 2, 1, 3, 4, 5}, {0, 2, 1, 4, 3, 5}, {0, 2, 1, 5, 3, 4},
      {0, 3, 1, 2, 4, 5}, {0, 3, 1, 4, 2, 5}, {0, 3, 1, 5, 2, 4},
      {0, 4, 1, 2, 3, 5}, {0, 4, 1, 3, 2, 5}, {0, 4, 1, 5, 2, 3},
      {0, 5, 1, 2, 3, 4}, {0, 5, 1, 3, 2, 4}, {0, 5, 1, 4, 2, 3}};
  Complex by_hand6(0.0, 0.0);
  for (const auto& p : pairings6)
    by_hand6 += tp(p[0], p[1]) * tp(p[2], p[3]) * tp(p[4], p[5]);
  const Complex got6 = wick_moments(st, fs);
  CHECK(std::abs(got6 - by_hand6) / std::abs(by_hand6) < 1e-13);
}

TEST_CASE("wick moments match truncated fock traces") {
  const ReservoirSpec r = one_mode(0.9, 0.5, 60);
  const GaussianState th = GaussianState::thermal(r, 1.0);
  const Matrix rho = fock_gibbs(r, 1.0);

  Rng rng(227);
  std::vector<ModeFunction> fs;
  std::vector<Matrix> ops;
  for (int k = 0; k < 6; ++k) {
    // Keep amplitudes moderate so the truncated trace stays converged.
    fs.push_back(0.6 * rand_complex_matrix(rng, 1, 1));
    ops.push_back(field_operator(r, fs.back()).mat());
  }

  Matrix prod4 = ops[0] * ops[1] * ops[2] * ops[3];
  const std::vector<ModeFunction> f4(fs.begin(), fs.begin() + 4);
  const Complex v4 = wick_moments(th, f4);
  CHECK(std::abs(v4 - (rho * prod4).trace()) < 1e-9);

  Matrix prod6 = prod4 * ops[4] * ops[5];
  const Complex v6 = wick_moments(th, fs);
  CHECK(std::abs(v6 - (rho * prod6).trace()) < 1e-8);
}

TEST_CASE("wick moments input validation") {
  const GaussianState vac = GaussianState::vacuum(1);
  std::vector<ModeFunction> many(17, Vector::Constant(1, Complex(0.1, 0.0)));
  CHECK_THROWS_AS(wick_moments(vac, many), validation_error);
  many.push_back(many[0]);
  CHECK_THROWS_AS(wick_moments(vac, many), validation_error);

  GaussianState shifted = vac;
  shifted.displacement[0] = 0.3;
  std::vector<ModeFunction> two(2, Vector::Constant(1, Complex(0.1, 0.0)));
  CHECK_THROWS_AS(wick_moments(shifted, two), validation_error);
}

TEST_CASE("heisenberg evolution matches brute force for a two level system") {
  const ReservoirSpec r = one_mode(1.1, 0.6, 24);
  Matrix gz(2, 2);
  gz << 1, 0, 0, -1;
  const SpectralDecomposition dec = spectral_decompose(HermitianMatrix(gz));

  Matrix a(2, 2);
  a << Complex(0.3, 0.1), Complex(0.7, -0.2), Complex(-0.4, 0.0),
      Complex(0.0, 0.25);
  const Vector h = Vector::Constant(1, Complex(0.3, 0.1));
  const double t = 0.9, lambda = 0.4;

  // Brute force on system (x) Fock.
  const Index df = r.fock_dim();
  const Matrix k_full =
      kron(Matrix::Identity(2, 2), reservoir_hamiltonian(r).mat()) +
      lambda * kron(gz, field_operator(r, r.couplings).mat());
  const Matrix u = expm_i_hermitian(HermitianMatrix(k_full), -t);  // e^{itK}
  const Matrix lhs = u * kron(a, fock_weyl(r, h)) * u.adjoint();

  const auto terms = heisenberg_weyl_evolve(dec, a, h, t, lambda, r);
  REQUIRE(terms.size() == 4);
  Matrix rhs = Matrix::Zero(2 * df, 2 * df);
  Matrix block_sum = Matrix::Zero(2, 2);
  for (const WeylTerm& term : terms) {
    rhs += kron(term.block, term.scalar * fock_weyl(r, term.weyl_arg));
    block_sum += term.block;
  }
  CHECK(max_abs(block_sum - a) < 1e-13);

  // Compare away from the truncation edge: keep Fock levels below 12.
  std::vector<Index> keep;
  for (Index s = 0; s < 2; ++s)
    for (Index n = 0; n < 12; ++n) keep.push_back(s * df + n);
  Matrix dl(keep.size(), keep.size()), dr(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) {
      dl(i, j) = lhs(keep[i], keep[j]);
      dr(i, j) = rhs(keep[i], keep[j]);
    }
  CHECK(max_abs(dl - dr) < 1e-8);
}

TEST_CASE("heisenberg evolution handles degenerate coupling levels") {
  // Exchange coupling on two qubits: levels -1, 0, +1 with a rank-two
  // middle level.
  Matrix g = Matrix::Zero(4, 4);
  g(1, 2) = 1.0;
  g(2, 1) = 1.0;
  const SpectralDecomposition dec = spectral_decompose(HermitianMatrix(g));
  const ReservoirSpec r = one_mode(0.8, 0.45, 18);

  Rng rng(233);
  const Matrix a = rand_complex_matrix(rng, 4, 4);
  const Vector h = Vector::Constant(1, Complex(0.2, -0.1));
  const double t = 0.7, lambda = 0.5;

  const Index df = r.fock_dim();
  const Matrix k_full =
      kron(Matrix::Identity(4, 4), reservoir_hamiltonian(r).mat()) +
      lambda * kron(g, field_operator(r, r.couplings).mat());
  const Matrix u = expm_i_hermitian(HermitianMatrix(k_full), -t);
  const Matrix lhs = u * kron(a, fock_weyl(r, h)) * u.adjoint();

  Matrix rhs = Matrix::Zero(4 * df, 4 * df);
  for (const WeylTerm& term : heisenberg_weyl_evolve(dec, a, h, t, lambda, r))
    rhs += kron(term.block, term.scalar * fock_weyl(r, term.weyl_arg));

  std::vector<Index> keep;
  for (Index s = 0; s < 4; ++s)
    for (Index n = 0; n < 9; ++n) keep.push_back(s * df + n);
  Matrix dl(keep.size(), keep.size()), dr(keep.size(), keep.size());
  for (std::size_t i = 0; i < keep.size(); ++i)
    for (std::size_t j = 0; j < keep.size(); ++j) {
      dl(i, j) = lhs(keep[i], keep[j]);
      dr(i, j) = rhs(keep[i], keep[j]);
    }
  CHECK(max_abs(dl - dr) < 1e-8);
}

TEST_CASE("heisenberg evolution at time zero is the identity map") {
  Matrix gz(2, 2);
  gz << 1, 0, 0, -1;
  const SpectralDecomposition dec = spectral_decompose(HermitianMatrix(gz));
  const ReservoirSpec r = one_mode(1.1, 0.6, 4);
  Rng rng(239);
  const Matrix a = rand_complex_matrix(rng, 2, 2);
  const Vector h = Vector::Constant(1, Complex(0.4, 0.2));

  Matrix sum = Matrix::Zero(2, 2);
  for (const WeylTerm& term : heisenberg_weyl_evolve(dec, a, h, 0.0, 0.9, r)) {
    CHECK(std::abs(term.scalar - Complex(1.0, 0.0)) < 1e-15);
    CHECK((term.weyl_arg - h).cwiseAbs().maxCoeff() < 1e-15);
    sum += term.block;
  }
  CHECK(max_abs(sum - a) < 1e-14);
}

TEST_CASE("coherence decay magnitude against brute force") {
  Matrix gz(2, 2);
  gz << 1, 0, 0, -1;
  const SpectralDecomposition dec = spectral_decompose(HermitianMatrix(gz));
  const double t = 1.3, lambda = 0.8;

  for (auto [beta, n_max, tol] :
       {std::tuple{kInf, Index{35}, 1e-9}, std::tuple{1.0, Index{45}, 1e-8}}) {
    const ReservoirSpec r = one_mode(0.9, 0.5, n_max);
    const GaussianState state =
        std::isinf(beta) ? GaussianState::vacuum(1)
                         : GaussianState::thermal(r, beta);

    const Matrix hr = reservoir_hamiltonian(r).mat();
    const Matrix phi = field_operator(r, r.couplings).mat();
    const auto prop = [&](double gamma) {
      return expm_i_hermitian(HermitianMatrix(hr + lambda * gamma * phi), t);
    };
    // Reservoir propagators attached to the left/right coupling levels.
    const Matrix u_l = prop(dec.eigenvalues[0]);
    const Matrix u_r = prop(dec.eigenvalues[1]);
    const Complex brute = (u_r.adjoint() * u_l * fock_gibbs(r, beta)).trace();

    const double direct =
        coherence_decay_magnitude(dec, 0, 1, t, lambda, r, state);
    CHECK(std::abs(direct - std::abs(brute)) < tol);
    CHECK(direct < 1.0);
  }
}

TEST_CASE("coherence decay magnitude limits and monotonicity") {
  Matrix gz(2, 2);
  gz << 1, 0, 0, -1;
  const SpectralDecomposition dec = spectral_decompose(HermitianMatrix(gz));
  const ReservoirSpec r = one_mode(0.9, 0.5, 4);
  const GaussianState vac = GaussianState::vacuum(1);

  CHECK(coherence_decay_magnitude(dec, 0, 0, 1.3, 0.8, r, vac) == 1.0);
  CHECK(coherence_decay_magnitude(dec, 0, 1, 0.0, 0.8, r, vac) == 1.0);

  const double d1 = coherence_decay_magnitude(dec, 0, 1, 0.7, 1.0, r, vac);
  const double d2 = coherence_decay_magnitude(dec, 0, 1, 0.7, 2.0, r, vac);
  CHECK(d1 < 1.0);
  CHECK(d2 < d1);
  CHECK_THROWS_AS(coherence_decay_magnitude(dec, 0, 2, 0.7, 1.0, r, vac),
                  validation_error);
}

TEST_CASE("dephasing reduced state matches exact propagation in vacuum") {
  Vector hd(2);
  hd << 0.9, -0.4;
  Matrix gz(2, 2);
  gz << 1, 0, 0, -1;
  const SystemSpec sys{HermitianMatrix(hd.asDiagonal()), HermitianMatrix(gz)};
  const ReservoirSpec r = one_mode(1.1, 0.55, 35);
  Rng rng(241);
  const DensityMatrix rho_s = rand_density(rng, 2);
  const double lambda = 0.8, t = 1.2;

  const Matrix h_full = assemble_hamiltonian(sys, r, lambda).mat();
  const Matrix u = expm_i_hermitian(HermitianMatrix(h_full), t);
  const Matrix rho0 = kron(rho_s.mat(), fock_gibbs(r, kInf));
  const Matrix rho_t = u * rho0 * u.adjoint();
  const Matrix reduced =
      partial_trace(rho_t, {2, r.fock_dim()}, {0});

  const DensityMatrix closed = dephasing_reduced_state(
      sys, rho_s, r, lambda, t, GaussianState::vacuum(1));
  CHECK(max_abs(closed.mat() - reduced) < 1e-9);
}

TEST_CASE("dephasing reduced state matches exact propagation thermally") {
  Vector hd(2);
  hd << 0.9, -0.4;
  Matrix gz(2, 2);
  gz << 1, 0, 0, -1;
  const SystemSpec sys{HermitianMatrix(hd.asDiagonal()), HermitianMatrix(gz)};
  const ReservoirSpec r = one_mode(1.1, 0.55, 45);
  Rng rng(251);
  const DensityMatrix rho_s = rand_density(rng, 2);
  const double lambda = 0.8, t = 1.2, beta = 1.0;

  const Matrix h_full = assemble_hamiltonian(sys, r, lambda).mat();
  const Matrix u = expm_i_hermitian(HermitianMatrix(h_full), t);
  const Matrix rho0 = kron(rho_s.mat(), fock_gibbs(r, beta));
  const Matrix reduced =
      partial_trace(u * rho0 * u.adjoint(), {2, r.fock_dim()}, {0});

  const DensityMatrix closed = dephasing_reduced_state(
      sys, rho_s, r, lambda, t, GaussianState::thermal(r, beta));
  CHECK(max_abs(closed.mat() - reduced) < 1e-8);
}

TEST_CASE("dephasing reduced state tracks a displaced reservoir") {
  Vector hd(2);
  hd << 0.6, -0.2;
  Matrix gz(2, 2);
  gz << 1, 0, 0, -1;
  const SystemSpec sys{HermitianMatrix(hd.asDiagonal()), HermitianMatrix(gz)};
  const ReservoirSpec r = one_mode(0.9, 0.5, 40);
  Rng rng(257);
  const DensityMatrix rho_s = rand_density(rng, 2);
  const double lambda = 0.7, t = 1.0;

  const Vector dv = Vector::Constant(1, Complex(0.35, -0.2));
  const Matrix wd = fock_weyl(r, dv);
  const Matrix rho_r = wd * fock_gibbs(r, kInf) * wd.adjoint();

  const Matrix h_full = assemble_hamiltonian(sys, r, lambda).mat();
  const Matrix u = expm_i_hermitian(HermitianMatrix(h_full), t);
  const Matrix reduced = partial_trace(u * kron(rho_s.mat(), rho_r) * u.adjoint(),
                                       {2, r.fock_dim()}, {0});

  GaussianState state = GaussianState::vacuum(1);
  state.displacement = dv;
  const DensityMatrix closed =
      dephasing_reduced_state(sys, rho_s, r, lambda, t, state);
  CHECK(max_abs(closed.mat() - reduced) < 1e-8);
}

TEST_CASE("dephasing reduced state with several modes") {
  SpectralDensity j;
  j.family = SpectralDensity::Family::ohmic;
  j.cutoff = 5.0;
  ReservoirSpec r = discretize_reservoir(j, 2, 8);
  Vector hd(2);
  hd << 0.9, -0.4;
  Matrix gz(2, 2);
  gz << 1, 0, 0, -1;
  const SystemSpec sys{HermitianMatrix(hd.asDiagonal()), HermitianMatrix(gz)};
  Rng rng(263);
  const DensityMatrix rho_s = rand_density(rng, 2);
  const double lambda = 0.7, t = 0.9;

  const Matrix h_full = assemble_hamiltonian(sys, r, lambda).mat();
  const Matrix u = expm_i_hermitian(HermitianMatrix(h_full), t);
  const Matrix rho0 = kron(rho_s.mat(), fock_gibbs(r, kInf));
  const Matrix reduced =
      partial_trace(u * rho0 * u.adjoint(), {2, r.fock_dim()}, {0});

  const DensityMatrix closed = dephasing_reduced_state(
      sys, rho_s, r, lambda, t, GaussianState::vacuum(2));
  CHECK(max_abs(closed.mat() - reduced) < 1e-6);
}

TEST_CASE("dephasing reduced state limits") {
  Vector hd(2);
  hd << 0.9, -0.4;
  Matrix gz(2, 2);
  gz << 1, 0, 0, -1;
  const SystemSpec sys{HermitianMatrix(hd.asDiagonal()), HermitianMatrix(gz)};
  const ReservoirSpec r = one_mode(1.1, 0.55, 4);
  const GaussianState vac = GaussianState::vacuum(1);
  Rng rng(269);
  const DensityMatrix rho_s = rand_density(rng, 2);
  const double t = 0.8;

  // Zero coupling: free system evolution.
  const Matrix u = expm_i_hermitian(sys.h_sys, t);
  const Matrix free_rho = u * rho_s.mat() * u.adjoint();
  CHECK(max_abs(dephasing_reduced_state(sys, rho_s, r, 0.0, t, vac).mat() -
                free_rho) < 1e-13);

  // Huge coupling: coherences between coupling levels are wiped out.
  const Matrix strong =
      dephasing_reduced_state(sys, rho_s, r, 1e3, t, vac).mat();
  CHECK(std::abs(strong(0, 1)) < 1e-12);
  CHECK(std::abs(strong(0, 0) - rho_s.mat()(0, 0)) < 1e-12);
  CHECK(std::abs(strong(1, 1) - rho_s.mat()(1, 1)) < 1e-12);

  // Non-commuting pairs are rejected.
  Matrix gx(2, 2);
  gx << 0, 1, 1, 0;
  const SystemSpec bad{HermitianMatrix(hd.asDiagonal()), HermitianMatrix(gx)};
  CHECK_THROWS_AS(dephasing_reduced_state(bad, rho_s, r, 0.5, t, vac),
                  validation_error);
}

TEST_CASE("decoherence function values") {
  SpectralDensity j;
  j.family = SpectralDensity::Family::ohmic;
  j.amplitude = 1.0;
  j.cutoff = 5.0;
  j.omega_c = 1.0;
  const double lambda1 = 0.6, delta = 0.25;

  CHECK(decoherence_function(kInf, lambda1, delta, j, 0.0) == 1.0);
  CHECK(decoherence_function(0.5, lambda1, delta, j, 0.0) == 1.0);

  // Frozen from 2*10^6-point trapezoid evaluations of the integral.
  CHECK(decoherence_function(kInf, lambda1, delta, j, 0.4) ==
        doctest::Approx(0.9967511803557191).epsilon(1e-8));
  CHECK(decoherence_function(0.5, lambda1, delta, j, 0.4) ==
        doctest::Approx(0.9856619198350389).epsilon(1e-8));
  CHECK(decoherence_function(kInf, lambda1, delta, j, 1.7) ==
        doctest::Approx(0.9699764678578195).epsilon(1e-8));
  CHECK(decoherence_function(0.5, lambda1, delta, j, 1.7) ==
        doctest::Approx(0.8200742786384063).epsilon(1e-8));

  for (double t : {0.1, 0.7, 2.9, 4.4}) {
    const double d = decoherence_function(0.5, lambda1, delta, j, t);
    CHECK(d > 0.0);
    CHECK(d <= 1.0);
  }
}

TEST_CASE("decoherence function infrared guard") {
  SpectralDensity flat;  // J = 1 near w = 0
  flat.cutoff = 5.0;

  // Thermally occupied flat density diverges like 1/w at the origin.
  CHECK_THROWS_AS(decoherence_function(0.5, 0.6, 0.25, flat, 1.0),
                  validation_error);
  // The vacuum integrand stays bounded, so the same density is accepted.
  const double d = decoherence_function(kInf, 0.6, 0.25, flat, 1.0);
  CHECK(d > 0.0);
  CHECK(d <= 1.0);
}

TEST_CASE("regularity bound closed forms for a single mode") {
  const ReservoirSpec r = one_mode(0.9, 0.8, 2);
  const GaussianState th = GaussianState::thermal(r, 0.5);
  // Peak two-point magnitude sits at zero shift: C |g|^2 / 2 with
  // C = coth(0.225).
  const double cp = 0.5 * 4.519192533721588 * 0.64;

  CHECK(regularity_bound(th, r, 2.0, 2) == doctest::Approx(cp).epsilon(1e-12));
  CHECK(regularity_bound(th, r, 2.0, 4) ==
        doctest::Approx(3.0 * cp * cp).epsilon(1e-12));
  CHECK(regularity_bound(th, r, 2.0, 6) ==
        doctest::Approx(15.0 * cp * cp * cp).epsilon(1e-12));
  CHECK(regularity_bound(th, r, 2.0, 3) ==
        doctest::Approx(std::sqrt(cp * 3.0 * cp * cp)).epsilon(1e-12));
}

TEST_CASE("regularity bound series ratios shrink with the order") {
  SpectralDensity j;
  j.family = SpectralDensity::Family::ohmic;
  j.cutoff = 5.0;
  const ReservoirSpec r = discretize_reservoir(j, 8, 2);
  const GaussianState th = GaussianState::thermal(r, 1.0);
  const double t = 1.5;

  for (double alpha : {1.0, 10.0}) {
    double prev = std::numeric_limits<double>::infinity();
    for (int n = 2; n <= 12; n += 2) {
      const double bn = regularity_bound(th, r, t, n);
      const double bn2 = regularity_bound(th, r, t, n + 2);
      const double ratio = bn2 * alpha * alpha / ((n + 1.0) * (n + 2.0) * bn);
      CHECK(ratio < prev);
      prev = ratio;
    }
  }

  CHECK_THROWS_AS(regularity_bound(th, r, 0.0, 2), validation_error);
  CHECK_THROWS_AS(regularity_bound(th, r, 1.0, 0), validation_error);
}

}  // TEST_SUITE
