// dglod: convergence, corrector-decay and single-run experiments for the
// two-level DG multiscale solver.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "dglod/config.hpp"
#include "dglod/error.hpp"
#include "dglod/experiment.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::string out;
  int threads = 1;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "Experiment configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", flags.out, "Output directory (overrides config)");
  cmd->add_option("--threads", flags.threads,
                  "Worker threads for corrector solves (0 = all cores)")
      ->check(CLI::NonNegativeNumber);
}

dglod::ExperimentConfig load(const CommonFlags& flags) {
  dglod::ExperimentConfig cfg =
      flags.config.empty() ? dglod::ExperimentConfig{}
                           : dglod::load_config(flags.config);
  if (!flags.out.empty()) cfg.output_dir = flags.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-level discontinuous Galerkin multiscale experiments"};
  app.require_subcommand(1);

  CommonFlags conv_flags, decay_flags, single_flags;
  auto* conv = app.add_subcommand(
      "convergence", "Relative energy error over a sequence of coarse meshes");
  add_common(conv, conv_flags);
  auto* decay = app.add_subcommand(
      "decay", "Distance between localized and ideal correctors per layer");
  add_common(decay, decay_flags);
  auto* single = app.add_subcommand(
      "single", "One multiscale solve with VTK output of both solutions");
  add_common(single, single_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (conv->parsed()) {
      const auto cfg = load(conv_flags);
      const auto result =
          dglod::run_convergence(cfg, {conv_flags.threads, &std::cout});
      dglod::write_convergence_outputs(cfg, result);
      std::cout << "wrote " << (cfg.output_dir / "convergence.csv").string()
                << '\n';
    } else if (decay->parsed()) {
      const auto cfg = load(decay_flags);
      const auto result =
          dglod::run_decay(cfg, {decay_flags.threads, &std::cout});
      dglod::write_decay_outputs(cfg, result);
      std::cout << "wrote " << (cfg.output_dir / "decay.csv").string() << '\n';
    } else if (single->parsed()) {
      const auto cfg = load(single_flags);
      const auto result =
          dglod::run_single(cfg, {single_flags.threads, &std::cout});
      dglod::write_single_outputs(cfg, result);
      std::cout << "wrote " << cfg.output_dir.string() << "/{single.csv,"
                << "reference.vtk,multiscale.vtk,difference.vtk}\n";
    }
  } catch (const dglod::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
