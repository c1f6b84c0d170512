#include "zeno/analysis.hpp"

#include <cmath>
#include <numeric>

namespace zeno {

namespace {

void require_same_dim(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim())
    throw validation_error("states have different dimensions");
}

// Square roots amplify rounding noise in near-zero eigenvalues (sqrt of
// 1e-17 is 3e-9), so eigenvalues below a relative floor are treated as 0.
RealVector clamped_sqrt_eigs(const EigenSystem& es) {
  const double floor =
      1e-14 * std::max(0.0, es.values[es.values.size() - 1]);
  RealVector roots(es.values.size());
  for (Index k = 0; k < es.values.size(); ++k)
    roots[k] = es.values[k] > floor ? std::sqrt(es.values[k]) : 0.0;
  return roots;
}

Matrix hermitian_sqrt(const Matrix& m) {
  const EigenSystem es = hermitian_eig(HermitianMatrix(m));
  const RealVector roots = clamped_sqrt_eigs(es);
  return es.vectors * roots.asDiagonal() * es.vectors.adjoint();
}

std::vector<Index> check_dims(const Matrix& rho, const std::vector<Index>& dims,
                              std::size_t factor) {
  if (dims.empty()) throw validation_error("factor dimension list is empty");
  Index total = 1;
  for (Index d : dims) {
    if (d < 1) throw validation_error("factor dimensions must be >= 1");
    total *= d;
  }
  if (total != rho.rows() || rho.rows() != rho.cols())
    throw validation_error("factor dimensions do not match the state");
  if (factor >= dims.size())
    throw validation_error("transpose factor index out of range");
  // Row-major strides of the factors.
  std::vector<Index> stride(dims.size());
  Index acc = 1;
  for (std::size_t k = dims.size(); k-- > 0;) {
    stride[k] = acc;
    acc *= dims[k];
  }
  return stride;
}

}  // namespace

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a, b);
  const EigenSystem es = hermitian_eig(HermitianMatrix(a.mat() - b.mat()));
  double sum = 0.0;
  for (Index k = 0; k < es.values.size(); ++k) sum += std::abs(es.values[k]);
  return 0.5 * sum;
}

double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  require_same_dim(a, b);
  const Matrix root_a = hermitian_sqrt(a.mat());
  const Matrix inner = root_a * b.mat() * root_a;
  const EigenSystem es = hermitian_eig(HermitianMatrix(inner));
  const double sum = clamped_sqrt_eigs(es).sum();
  return std::min(1.0, sum * sum);
}

Matrix partial_transpose(const Matrix& rho, const std::vector<Index>& dims,
                         std::size_t factor) {
  const std::vector<Index> stride = check_dims(rho, dims, factor);
  const Index df = dims[factor];
  const Index sf = stride[factor];

  Matrix out(rho.rows(), rho.cols());
  for (Index i = 0; i < rho.rows(); ++i) {
    const Index di = (i / sf) % df;
    const Index base_i = i - di * sf;
    for (Index j = 0; j < rho.cols(); ++j) {
      const Index dj = (j / sf) % df;
      const Index base_j = j - dj * sf;
      // Swap the chosen factor's row and column digits.
      out(base_i + dj * sf, base_j + di * sf) = rho(i, j);
    }
  }
  return out;
}

double negativity(const DensityMatrix& rho, const std::vector<Index>& dims,
                  std::size_t transpose_factor) {
  const Matrix pt = partial_transpose(rho.mat(), dims, transpose_factor);
  const EigenSystem es = hermitian_eig(HermitianMatrix(pt));
  double neg = 0.0;
  for (Index k = 0; k < es.values.size(); ++k)
    neg += std::max(0.0, -es.values[k]);
  return neg;
}

EntanglementReport zeno_limit_separability_check(const DensityMatrix& rho_s,
                                                 const std::vector<Index>& dims,
                                                 const HermitianMatrix& coupling,
                                                 const HermitianMatrix& h_sys,
                                                 double t) {
  if (dims.size() != 2)
    throw validation_error("separability check needs a bipartition");
  if (coupling.dim() != rho_s.dim() || h_sys.dim() != rho_s.dim())
    throw validation_error("operator dimensions do not match the state");

  const SpectralDecomposition dec = spectral_decompose(coupling);
  const DensityMatrix measured = measure(rho_s, dec);
  const Matrix u = expm_i_hermitian(zeno_hamiltonian(h_sys, dec), t);
  const DensityMatrix limit_state =
      DensityMatrix(u * measured.mat() * u.adjoint());

  EntanglementReport report;
  report.negativity = negativity(limit_state, dims, 1);
  report.ppt = report.negativity < 1e-12;
  const Index da = dims[0], db = dims[1];
  report.ppt_conclusive = (da == 2 && db == 2) || (da == 2 && db == 3) ||
                          (da == 3 && db == 2);
  report.all_rank_one = true;
  for (Index rank : dec.ranks)
    if (rank != 1) report.all_rank_one = false;

  if (!report.ppt_conclusive)
    report.caveat =
        "positive partial transpose does not decide separability for this "
        "partition size";
  else if (!report.all_rank_one)
    report.caveat =
        "degenerate coupling levels: the measured state can stay entangled";
  return report;
}

std::vector<DensityMatrix> collision_sequence(
    const DensityMatrix& rho_s,
    const std::vector<SpectralDecomposition>& decs) {
  std::vector<DensityMatrix> out;
  out.reserve(decs.size());
  DensityMatrix current = rho_s;
  for (const SpectralDecomposition& dec : decs) {
    current = measure(current, dec);
    out.push_back(current);
  }
  return out;
}

}  // namespace zeno
