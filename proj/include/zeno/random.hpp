#pragma once

// Seed-deterministic random operators and states.  Used by property tests
// and by the sampled experiments; fixed generator (mt19937_64) so results
// are reproducible across platforms.

#include <random>

#include "zeno/linalg.hpp"

namespace zeno {

using Rng = std::mt19937_64;

inline Matrix rand_complex_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> n;
  Matrix m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = Complex(n(rng), n(rng));
  return m;
}

inline HermitianMatrix rand_hermitian(Rng& rng, Index d) {
  Matrix g = rand_complex_matrix(rng, d, d);
  return HermitianMatrix(0.5 * (g + g.adjoint().eval()));
}

inline Vector rand_pure(Rng& rng, Index d) {
  Vector v = rand_complex_matrix(rng, d, 1);
  return v / v.norm();
}

// Haar-random unitary: QR of a Ginibre matrix with the phase fix that makes
// the diagonal of R positive.
inline Matrix rand_unitary(Rng& rng, Index d) {
  Matrix g = rand_complex_matrix(rng, d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index k = 0; k < d; ++k) {
    Complex rkk = r(k, k);
    q.col(k) *= (rkk == Complex(0) ? 1.0 : rkk / std::abs(rkk));
  }
  return q;
}

// Full-rank random state: Haar eigenbasis with a normalized flat Dirichlet
// spectrum, so eigenvalues are strictly positive almost surely.
inline DensityMatrix rand_density(Rng& rng, Index d) {
  std::exponential_distribution<double> e(1.0);
  RealVector p(d);
  for (Index k = 0; k < d; ++k) p(k) = e(rng);
  p /= p.sum();
  Matrix u = rand_unitary(rng, d);
  return DensityMatrix(u * p.cast<Complex>().asDiagonal() * u.adjoint());
}

}  // namespace zeno
