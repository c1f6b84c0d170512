#include "zeno/model.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <Eigen/Dense>

namespace zeno {

double SpectralDensity::operator()(double omega) const {
  switch (family) {
    case Family::flat:
      return amplitude;
    case Family::ohmic:
      return amplitude * omega * std::exp(-omega / omega_c);
  }
  throw std::logic_error("unknown spectral density family");
}

void SpectralDensity::validate() const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude))
    throw validation_error("spectral density amplitude must be >= 0");
  if (!(cutoff > 0.0) || !std::isfinite(cutoff))
    throw validation_error("spectral density cutoff must be > 0");
  if (family == Family::ohmic && (!(omega_c > 0.0) || !std::isfinite(omega_c)))
    throw validation_error("ohmic scale omega_c must be > 0");
}

Index ReservoirSpec::fock_dim() const {
  const Index base = local_dim();
  Index dim = 1;
  for (Index j = 0; j < modes(); ++j) {
    if (dim > std::numeric_limits<Index>::max() / base)
      throw validation_error("Fock space dimension overflows");
    dim *= base;
  }
  return dim;
}

void ReservoirSpec::validate() const {
  if (modes() < 1) throw validation_error("reservoir needs at least one mode");
  if (couplings.size() != modes())
    throw validation_error("frequency and coupling counts differ");
  if (n_max < 1) throw validation_error("n_max must be >= 1");
  for (Index j = 0; j < modes(); ++j) {
    if (!std::isfinite(frequencies[j]) || frequencies[j] < 0.0)
      throw validation_error("mode frequencies must be finite and >= 0");
    if (!std::isfinite(std::abs(couplings[j])))
      throw validation_error("mode couplings must be finite");
  }
  // fock_dim() is checked where operators are actually built; large-mode
  // reservoirs are fine for pure mode-sum work.
}

SystemSpec::SystemSpec(HermitianMatrix h, HermitianMatrix g)
    : h_sys(std::move(h)), coupling(std::move(g)) {
  if (h_sys.dim() != coupling.dim())
    throw validation_error("system Hamiltonian and coupling dimensions differ");
}

std::pair<RealVector, RealVector> gauss_legendre(Index m, double a, double b) {
  if (m < 1) throw validation_error("quadrature order must be >= 1");
  if (!(a < b)) throw validation_error("quadrature interval must have a < b");
  // Golub-Welsch: eigenvalues of the symmetric Jacobi matrix are the nodes
  // on [-1, 1]; weights come from the first eigenvector components.
  Matrix jac = Matrix::Zero(m, m);
  for (Index k = 1; k < m; ++k) {
    const double bk =
        static_cast<double>(k) / std::sqrt(4.0 * k * k - 1.0);
    jac(k - 1, k) = bk;
    jac(k, k - 1) = bk;
  }
  const EigenSystem es = hermitian_eig(HermitianMatrix(jac));
  RealVector nodes(m), weights(m);
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  for (Index k = 0; k < m; ++k) {
    nodes[k] = mid + half * es.values[k];
    weights[k] = 2.0 * half * std::norm(es.vectors(0, k));
  }
  return {nodes, weights};
}

ReservoirSpec discretize_reservoir(const SpectralDensity& family, Index m,
                                   Index n_max) {
  family.validate();
  auto [nodes, weights] = gauss_legendre(m, 0.0, family.cutoff);
  ReservoirSpec r;
  r.frequencies = nodes;
  r.couplings = Vector(m);
  for (Index j = 0; j < m; ++j)
    r.couplings[j] = std::sqrt(family(nodes[j]) * weights[j]);
  r.n_max = n_max;
  r.density = family;
  r.validate();
  return r;
}

Matrix fock_annihilation(Index n_levels) {
  if (n_levels < 2) throw validation_error("need at least two Fock levels");
  Matrix a = Matrix::Zero(n_levels, n_levels);
  for (Index n = 1; n < n_levels; ++n)
    a(n - 1, n) = std::sqrt(static_cast<double>(n));
  return a;
}

Matrix mode_lowering(const ReservoirSpec& r, Index j) {
  r.validate();
  if (j < 0 || j >= r.modes()) throw validation_error("mode index out of range");
  const Index d = r.local_dim();
  Matrix op = Matrix::Identity(1, 1);
  for (Index k = 0; k < r.modes(); ++k)
    op = kron(op, k == j ? fock_annihilation(d) : Matrix::Identity(d, d));
  return op;
}

HermitianMatrix field_operator(const ReservoirSpec& r, const Vector& coeffs) {
  r.validate();
  if (coeffs.size() != r.modes())
    throw validation_error("coefficient count does not match mode count");
  const Index dim = r.fock_dim();
  Matrix phi = Matrix::Zero(dim, dim);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (Index j = 0; j < r.modes(); ++j) {
    const Matrix a = mode_lowering(r, j);
    phi += inv_sqrt2 * (coeffs[j] * a.adjoint() + std::conj(coeffs[j]) * a);
  }
  return HermitianMatrix(phi);
}

HermitianMatrix reservoir_hamiltonian(const ReservoirSpec& r) {
  r.validate();
  const Index dim = r.fock_dim();
  const Index base = r.local_dim();
  // Diagonal in the Fock basis: decode occupation numbers from the index.
  Vector diag(dim);
  for (Index idx = 0; idx < dim; ++idx) {
    double energy = 0.0;
    Index rest = idx;
    for (Index j = r.modes() - 1; j >= 0; --j) {
      energy += r.frequencies[j] * static_cast<double>(rest % base);
      rest /= base;
    }
    diag[idx] = energy;
  }
  return HermitianMatrix(diag.asDiagonal());
}

HermitianMatrix assemble_hamiltonian(const SystemSpec& sys,
                                     const ReservoirSpec& r, double lambda) {
  const Index df = r.fock_dim();
  const Matrix id_s = Matrix::Identity(sys.dim(), sys.dim());
  const Matrix id_f = Matrix::Identity(df, df);
  Matrix h = kron(sys.h_sys.mat(), id_f);
  h += kron(id_s, reservoir_hamiltonian(r).mat());
  h += lambda * kron(sys.coupling.mat(), field_operator(r, r.couplings).mat());
  return HermitianMatrix(std::move(h));
}

SpectralDecomposition spectral_decompose(const HermitianMatrix& g,
                                         double cluster_tol) {
  if (!(cluster_tol >= 0.0))
    throw validation_error("cluster tolerance must be >= 0");
  const EigenSystem es = hermitian_eig(g);
  const Index d = g.dim();
  SpectralDecomposition dec;
  Index start = 0;
  for (Index k = 1; k <= d; ++k) {
    if (k < d && es.values[k] - es.values[k - 1] <= cluster_tol) continue;
    const Index count = k - start;
    const auto block = es.vectors.middleCols(start, count);
    dec.eigenvalues.push_back(
        es.values.segment(start, count).sum() / static_cast<double>(count));
    dec.projections.push_back(block * block.adjoint());
    dec.ranks.push_back(count);
    start = k;
  }
  return dec;
}

namespace {

Matrix sandwich_sum(const Matrix& a, const SpectralDecomposition& dec) {
  if (dec.dim() != a.rows())
    throw validation_error("decomposition dimension does not match operator");
  Matrix out = Matrix::Zero(a.rows(), a.cols());
  for (const Matrix& p : dec.projections) out += p * a * p;
  return out;
}

}  // namespace

HermitianMatrix zeno_hamiltonian(const HermitianMatrix& h_sys,
                                 const SpectralDecomposition& dec) {
  return HermitianMatrix(sandwich_sum(h_sys.mat(), dec));
}

DensityMatrix measure(const DensityMatrix& rho,
                      const SpectralDecomposition& dec) {
  return DensityMatrix(sandwich_sum(rho.mat(), dec));
}

HermitianMatrix project_coupling(const HermitianMatrix& a,
                                 const SpectralDecomposition& dec) {
  return HermitianMatrix(sandwich_sum(a.mat(), dec));
}

HermitianMatrix composite_coupling(const CompositeCoupling& c) {
  if (c.site_ops.empty())
    throw validation_error("composite coupling needs at least one site");
  if (c.mu < 0.0 || !std::isfinite(c.mu))
    throw validation_error("perturbation strength mu must be finite and >= 0");

  // Perturbed site operators; the draw order (sites in order, upper triangle
  // row by row) pins the result for a given seed.
  std::mt19937_64 rng(c.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Matrix> sites;
  sites.reserve(c.site_ops.size());
  for (const HermitianMatrix& g : c.site_ops) {
    Matrix site = g.mat();
    if (c.mu > 0.0) {
      const Index d = g.dim();
      Matrix xi = Matrix::Zero(d, d);
      for (Index i = 0; i < d; ++i)
        for (Index j = i; j < d; ++j) {
          const double v = normal(rng);
          xi(i, j) = v;
          xi(j, i) = v;
        }
      site += c.mu * xi;
    }
    sites.push_back(std::move(site));
  }

  Index total = 1;
  for (const Matrix& s : sites) {
    if (total > std::numeric_limits<Index>::max() / s.rows())
      throw validation_error("composite space dimension overflows");
    total *= s.rows();
  }

  if (c.combine == CompositeCoupling::Combine::product) {
    Matrix out = Matrix::Identity(1, 1);
    for (const Matrix& s : sites) out = kron(out, s);
    return HermitianMatrix(std::move(out));
  }

  Matrix out = Matrix::Zero(total, total);
  for (std::size_t n = 0; n < sites.size(); ++n) {
    Matrix term = Matrix::Identity(1, 1);
    for (std::size_t k = 0; k < sites.size(); ++k) {
      const Index dk = sites[k].rows();
      term = kron(term, k == n ? sites[k] : Matrix::Identity(dk, dk));
    }
    out += term;
  }
  return HermitianMatrix(std::move(out));
}

}  // namespace zeno
