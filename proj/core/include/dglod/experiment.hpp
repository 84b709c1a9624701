#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "dglod/config.hpp"
#include "dglod/lod.hpp"

namespace dglod {

struct RunOptions {
  int threads = 1;
  std::ostream* log = nullptr;  // progress messages; null for silence
};

struct ConvergenceRow {
  int coarse_exponent = 0;
  double coarse_h = 0.0;
  int n_dof = 0;
  Layers layers;
  double rel_energy_error = 0.0;
  // Diffusion and convection parts of the error norm, relative to the
  // reference energy norm; their squares sum to rel_energy_error^2.
  double diffusion_part = 0.0;
  double convection_part = 0.0;
  double wall_seconds = 0.0;
  double convection_size = 0.0;  // ||H b||_inf / alpha
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  // Least-squares slope of log(error) against log(N_dof).
  std::optional<double> slope;
};

ConvergenceResult run_convergence(const ExperimentConfig& cfg,
                                  const RunOptions& opts = {});

std::optional<double> fit_slope(const std::vector<ConvergenceRow>& rows);

struct DecayResult {
  int coarse_exponent = 0;
  int element = 0;
  std::vector<DecayRow> rows;
  std::optional<double> gamma;
};

DecayResult run_decay(const ExperimentConfig& cfg, const RunOptions& opts = {});

struct SingleResult {
  ConvergenceRow row;
  double reference_norm = 0.0;
  double multiscale_norm = 0.0;
  Vector reference;
  Vector multiscale;
};

SingleResult run_single(const ExperimentConfig& cfg,
                        const RunOptions& opts = {});

// CSV writers. Numbers use the shortest round-trip decimal form.
void write_convergence_csv(std::ostream& out,
                           const std::vector<ConvergenceRow>& rows,
                           bool record_wall_time);
void write_decay_csv(std::ostream& out, const DecayResult& result);

// Write the result files of each experiment into cfg.output_dir together
// with config.txt (the configuration text as given).
void write_convergence_outputs(const ExperimentConfig& cfg,
                               const ConvergenceResult& result);
void write_decay_outputs(const ExperimentConfig& cfg,
                         const DecayResult& result);
void write_single_outputs(const ExperimentConfig& cfg,
                          const SingleResult& result);

}  // namespace dglod
