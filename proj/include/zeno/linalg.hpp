#pragma once

// Dense complex linear algebra backbone: Hermitian eigendecomposition,
// eigenphase matrix exponentials, tensor products, partial traces.
//
// Tensor factor order is fixed globally as (system, reservoir-1, reservoir-2)
// and every index computation in this project assumes it.  Factor 0 is the
// slowest-varying index, matching kron(a, b) with a on factor 0.

#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace zeno {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Shared numerical tolerances.  Double precision at dimensions up to 4096.
inline constexpr double kHermitianTol = 1e-12;   // per-entry |m - m†|
inline constexpr double kUnitaryTol = 1e-10;     // ‖U†U − I‖_max
inline constexpr double kTraceTol = 1e-10;       // |tr ρ − 1|
inline constexpr double kPositivityTol = 1e-10;  // eigenvalue roundoff slack

// Thrown when a matrix fails a structural precondition (shape, hermiticity,
// trace, positivity).  Distinct from std::invalid_argument so callers can
// map domain validation to a dedicated exit code.
class validation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_hermitian(const Matrix& m, double tol = kHermitianTol);

// Square matrix equal to its conjugate transpose within kHermitianTol
// per entry.  Stores the exactly hermitized average (m + m†)/2 so that
// downstream eigensolves see a symmetric input bit-for-bit.
class HermitianMatrix {
 public:
  explicit HermitianMatrix(Matrix m);
  const Matrix& mat() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

// Trace-one positive-semidefinite Hermitian matrix.  Construction verifies
// trace within kTraceTol and min eigenvalue ≥ −kPositivityTol.
class DensityMatrix {
 public:
  explicit DensityMatrix(Matrix m);
  static DensityMatrix pure(const Vector& psi);
  const Matrix& mat() const { return m_; }
  Index dim() const { return m_.rows(); }

 private:
  Matrix m_;
};

struct EigenSystem {
  RealVector values;  // ascending
  Matrix vectors;     // columns, orthonormal
};

// Dense Hermitian eigendecomposition, m = V diag(e) V†, eigenvalues ascending.
EigenSystem hermitian_eig(const HermitianMatrix& m);

// e^{-i t m} via eigenphases.  Exactly unitary up to rounding; never Padé,
// since every exponentiated operator in this project is Hermitian.
Matrix expm_i_hermitian(const HermitianMatrix& m, double t);

// Kronecker (tensor) product, a on the slower-varying factor.
Matrix kron(const Matrix& a, const Matrix& b);

// Trace out the factors not listed in `keep` from an operator on a tensor
// product with the given factor dimensions.  `keep` must be strictly
// increasing; kept factors retain their relative order.
Matrix partial_trace(const Matrix& a, const std::vector<Index>& dims,
                     const std::vector<Index>& keep);
DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<Index>& dims,
                            const std::vector<Index>& keep);

}  // namespace zeno
