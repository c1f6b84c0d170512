#include "zeno/linalg.hpp"

#include <cmath>

namespace zeno {

namespace {

void require_finite(const Matrix& m) {
  if (!m.allFinite()) throw validation_error("matrix has NaN/Inf entries");
}

}  // namespace

bool is_hermitian(const Matrix& m, double tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

HermitianMatrix::HermitianMatrix(Matrix m) {
  require_finite(m);
  if (m.rows() != m.cols())
    throw validation_error("hermitian matrix must be square");
  if (!is_hermitian(m))
    throw validation_error("matrix is not hermitian within 1e-12");
  // symmetrize so the eigensolver sees an exactly self-adjoint input
  m_ = 0.5 * (m + m.adjoint().eval());
}

DensityMatrix::DensityMatrix(Matrix m) {
  HermitianMatrix h(std::move(m));
  const double tr = h.mat().trace().real();
  if (std::abs(tr - 1.0) > kTraceTol)
    throw validation_error("density matrix trace differs from 1 beyond 1e-10");
  Eigen::SelfAdjointEigenSolver<Matrix> es(h.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw validation_error("eigensolver failed on density matrix");
  if (es.eigenvalues()(0) < -kPositivityTol)
    throw validation_error("density matrix has a negative eigenvalue");
  m_ = h.mat();
}

DensityMatrix DensityMatrix::pure(const Vector& psi) {
  const double n2 = psi.squaredNorm();
  if (n2 <= 0.0 || !std::isfinite(n2))
    throw validation_error("pure state vector must be nonzero and finite");
  return DensityMatrix(psi * psi.adjoint() / n2);
}

EigenSystem hermitian_eig(const HermitianMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m.mat());
  if (es.info() != Eigen::Success)
    throw std::runtime_error("hermitian eigensolver failed to converge");
  return {es.eigenvalues(), es.eigenvectors()};
}

Matrix expm_i_hermitian(const HermitianMatrix& m, double t) {
  const EigenSystem es = hermitian_eig(m);
  Vector phases(es.values.size());
  for (Index k = 0; k < es.values.size(); ++k)
    phases(k) = std::polar(1.0, -t * es.values(k));
  return es.vectors * phases.asDiagonal() * es.vectors.adjoint();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix partial_trace(const Matrix& a, const std::vector<Index>& dims,
                     const std::vector<Index>& keep) {
  const Index nf = static_cast<Index>(dims.size());
  Index total = 1;
  for (Index d : dims) {
    if (d < 1) throw validation_error("factor dimensions must be positive");
    total *= d;
  }
  if (a.rows() != total || a.cols() != total)
    throw validation_error("matrix dimension does not match factor dimensions");
  for (size_t i = 0; i < keep.size(); ++i) {
    if (keep[i] < 0 || keep[i] >= nf)
      throw validation_error("keep index out of range");
    if (i > 0 && keep[i] <= keep[i - 1])
      throw validation_error("keep indices must be strictly increasing");
  }

  // row-major strides of each factor in the composite index
  std::vector<Index> stride(dims.size());
  Index s = 1;
  for (Index f = nf - 1; f >= 0; --f) {
    stride[f] = s;
    s *= dims[f];
  }

  std::vector<Index> traced;
  Index dkeep = 1, dtrace = 1;
  {
    size_t ki = 0;
    for (Index f = 0; f < nf; ++f) {
      if (ki < keep.size() && keep[ki] == f) {
        dkeep *= dims[f];
        ++ki;
      } else {
        traced.push_back(f);
        dtrace *= dims[f];
      }
    }
  }

  // composite index of a multi-index restricted to a factor subset
  auto embed = [&](Index packed, const std::vector<Index>& factors) {
    Index idx = 0;
    for (Index f = static_cast<Index>(factors.size()) - 1; f >= 0; --f) {
      const Index d = dims[factors[f]];
      idx += (packed % d) * stride[factors[f]];
      packed /= d;
    }
    return idx;
  };

  std::vector<Index> keep_base(dkeep), trace_base(dtrace);
  for (Index k = 0; k < dkeep; ++k) keep_base[k] = embed(k, keep);
  for (Index k = 0; k < dtrace; ++k) trace_base[k] = embed(k, traced);

  Matrix out = Matrix::Zero(dkeep, dkeep);
  for (Index r = 0; r < dkeep; ++r)
    for (Index c = 0; c < dkeep; ++c) {
      Complex sum = 0.0;
      for (Index y = 0; y < dtrace; ++y)
        sum += a(keep_base[r] + trace_base[y], keep_base[c] + trace_base[y]);
      out(r, c) = sum;
    }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho,
                            const std::vector<Index>& dims,
                            const std::vector<Index>& keep) {
  return DensityMatrix(partial_trace(rho.mat(), dims, keep));
}

}  // namespace zeno
