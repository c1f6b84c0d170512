#pragma once

// Structured experiment configuration: one JSON document resolving to
// concrete operators, reservoir data and evaluation grids, fully validated
// before any computation starts.
//
// Error taxonomy: structural problems (syntax, missing or mistyped keys,
// malformed matrix literals) throw config_parse_error and map to exit code
// 2; semantic problems (unknown presets or experiment kinds, dimension
// mismatches, non-Hermitian operators, invalid states, empty grids,
// per-experiment requirements) throw validation_error and map to exit 3.

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "zeno/linalg.hpp"
#include "zeno/model.hpp"

namespace zeno {

class config_parse_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ExperimentKind { sweep, dephasing, entanglement, collision,
                            multires };

std::string to_string(ExperimentKind kind);

struct ReservoirConfig {
  SpectralDensity density;
  Index modes = 1;
  Index n_max = 1;
  double beta = std::numeric_limits<double>::infinity();
};

// Fully resolved configuration.  Operator presets and composite coupling
// blocks are already expanded into explicit matrices; matrices not used by
// the chosen experiment kind are left 0x0.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::sweep;
  std::uint64_t seed = 0;
  std::string output;
  Index dimension = 0;
  Matrix h;              // system hamiltonian
  Matrix coupling;       // coupling operator of the (first) reservoir
  Matrix coupling2;      // measured coupling of the dominant reservoir
  Matrix initial_state;  // initial system density matrix (0x0 when sampled)
  ReservoirConfig reservoir;
  bool has_reservoir = false;
  std::vector<double> lambda_grid;
  std::vector<double> time_grid;
  Index samples = 0;               // entanglement sample count
  std::vector<Matrix> collisions;  // measured operators, in order
};

// Parses and validates the JSON document at path (see the error taxonomy
// above).  The returned configuration is ready to run.
ExperimentConfig load_config(const std::string& path);

}  // namespace zeno
