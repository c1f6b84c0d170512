#pragma once

// State comparison metrics, entanglement diagnostics for the measurement
// limit, and repeated-measurement (collision) sequences.

#include <string>
#include <vector>

#include "zeno/linalg.hpp"
#include "zeno/model.hpp"

namespace zeno {

// 1/2 ||a - b||_1: the operational distinguishability metric used for all
// convergence statements.
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2, reported alongside the
// trace distance as an auxiliary diagnostic.
double fidelity(const DensityMatrix& a, const DensityMatrix& b);

// Transpose of one tensor factor; dims lists the factor dimensions.
Matrix partial_transpose(const Matrix& rho, const std::vector<Index>& dims,
                         std::size_t factor);

// Sum of the negative eigenvalues (in magnitude) of the partial transpose.
double negativity(const DensityMatrix& rho, const std::vector<Index>& dims,
                  std::size_t transpose_factor);

struct EntanglementReport {
  double negativity = 0.0;
  bool ppt = false;             // partial transpose is positive
  bool ppt_conclusive = false;  // PPT decides separability (2x2 and 2x3 only)
  bool all_rank_one = false;    // every coupling level is simple
  std::string caveat;           // set when a flag above limits the conclusion
};

// Entanglement diagnosis of the strong-coupling limit state
// e^{-itH_Z} (sum_l P_l rho P_l) e^{itH_Z} across the bipartition in dims.
EntanglementReport zeno_limit_separability_check(const DensityMatrix& rho_s,
                                                 const std::vector<Index>& dims,
                                                 const HermitianMatrix& coupling,
                                                 const HermitianMatrix& h_sys,
                                                 double t);

// Applies the nonselective measurements in order; element k of the result
// is the state after the first k+1 measurements.
std::vector<DensityMatrix> collision_sequence(
    const DensityMatrix& rho_s, const std::vector<SpectralDecomposition>& decs);

}  // namespace zeno
