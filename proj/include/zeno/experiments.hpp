#pragma once

// Experiment orchestration: turns a validated configuration into a CSV
// artifact.  One file per run, written once, rows in grid order; floats are
// printed with 17 significant digits so re-runs with the same config and
// seed reproduce the file byte for byte (the timestamped comment line and
// the measured wall_ms column of the sweep are the only exceptions).

#include <cstdint>
#include <string>

#include "zeno/config.hpp"

namespace zeno {

struct RunOptions {
  std::string out_override;  // wins over the config's output path
  bool has_seed_override = false;
  std::uint64_t seed_override = 0;
  int threads = 0;           // <= 0 leaves library threading untouched
  bool quiet = false;        // drops informational notes, never warnings
};

// Runs the experiment and writes its CSV artifact.  Returns the process
// exit status (0 on success; truncation flags demote to a stderr warning).
// Throws validation_error when the merged options are unusable, and lets
// numerical-guard exceptions from the library propagate.
int run_experiment(const ExperimentConfig& cfg, const RunOptions& opt);

}  // namespace zeno
