// zenosim: command line front end for the zeno toolkit.
//
// Each subcommand reads one JSON config, runs one experiment, and writes one
// CSV artifact.  `validate` only parses and checks the config.
//
// Exit codes: 0 success (including runs that print a truncation warning),
// 2 config parse or usage error, 3 semantic validation or runtime failure.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "zeno/config.hpp"
#include "zeno/experiments.hpp"

namespace {

constexpr const char* kFooter = R"(Config format (JSON):
  experiment   one of: sweep, dephasing, entanglement, collision, multires
  seed         unsigned integer, default 0 (overridden by --seed)
  output       CSV path (overridden by --out)
  system       dimension, h, coupling, coupling2, initial_state
  reservoir    family (flat|ohmic), amplitude, cutoff, omega_c, modes, n_max,
               beta (positive number or "inf")
  lambda_grid  array of coupling strengths
  time_grid    array of times
  samples      entanglement only: number of random input states
  collisions   collision only: array of Hermitian matrices or presets

Matrices are arrays of rows of [re, im] pairs.  Operator presets: sigma_x,
sigma_y, sigma_z, identity, zero.  State presets: plus, basis0, mixed,
bell_phi, bell_psi.  A composite coupling may be given as coupling_composite
with keys sites, combine (sum|product), mu, seed.

CSV columns:
  sweep         lambda,t,trace_distance,fidelity,top_fock_population,
                n_max_used,truncation_ok,wall_ms
  dephasing     t,coh_re_analytic,coh_im_analytic,coh_re_sim,coh_im_sim,
                abs_err,decoherence_magnitude
  entanglement  t,sample,negativity_input,negativity_limit,ppt,
                ppt_conclusive,all_rank_one
  collision     step,trace_distance_to_mixed,purity
  multires      t,coh_re,coh_im,coh_abs,pop_drift,purity

Re-running the same config reproduces the artifact byte for byte, except the
timestamped '#' header line and the measured wall_ms column of sweep.)";

struct Cli {
  std::string config_path;
  zeno::RunOptions opt;
};

void add_common(CLI::App* sub, Cli& cli, CLI::Option*& seed_opt) {
  sub->add_option("--config", cli.config_path, "JSON config file")
      ->required();
  sub->add_option("--out", cli.opt.out_override,
                  "output CSV path (overrides the config)");
  seed_opt = sub->add_option("--seed", cli.opt.seed_override,
                             "RNG seed (overrides the config)");
  sub->add_option("--threads", cli.opt.threads,
                  "Eigen thread count (0 keeps the default)");
  sub->add_flag("--quiet", cli.opt.quiet, "suppress informational messages");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "zenosim: exact strong-coupling dynamics of small open quantum "
      "systems"};
  app.footer(kFooter);
  app.require_subcommand(1);

  Cli cli;
  const char* kinds[] = {"sweep", "dephasing", "entanglement", "collision",
                         "multires"};
  const char* briefs[] = {
      "coupling-strength sweep against the projective-limit reference",
      "commuting-coupling coherence decay, closed form vs simulation",
      "entanglement of the projected limit state for random inputs",
      "repeated nonselective measurements in distinct bases",
      "two-reservoir evolution with one reservoir in the strong limit"};
  CLI::Option* seed_opts[5] = {};
  for (int k = 0; k < 5; ++k)
    add_common(app.add_subcommand(kinds[k], briefs[k]), cli, seed_opts[k]);
  CLI::App* validate = app.add_subcommand(
      "validate", "parse and check a config without running it");
  CLI::Option* validate_seed = nullptr;
  add_common(validate, cli, validate_seed);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const zeno::ExperimentConfig cfg = zeno::load_config(cli.config_path);
    const CLI::App* sub = app.get_subcommands().front();
    if (sub == validate) {
      if (!cli.opt.quiet)
        std::fprintf(stderr, "config ok (%s)\n",
                     zeno::to_string(cfg.kind).c_str());
      return 0;
    }
    if (sub->get_name() != zeno::to_string(cfg.kind))
      throw zeno::validation_error("config declares experiment '" +
                                   zeno::to_string(cfg.kind) +
                                   "' but subcommand is '" + sub->get_name() +
                                   "'");
    for (int k = 0; k < 5; ++k)
      if (sub->get_name() == kinds[k])
        cli.opt.has_seed_override = seed_opts[k]->count() > 0;
    return zeno::run_experiment(cfg, cli.opt);
  } catch (const zeno::config_parse_error& e) {
    std::fprintf(stderr, "zenosim: config error: %s\n", e.what());
    return 2;
  } catch (const zeno::validation_error& e) {
    std::fprintf(stderr, "zenosim: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "zenosim: %s\n", e.what());
    return 3;
  }
}
