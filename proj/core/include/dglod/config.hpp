#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dglod/coeff.hpp"
#include "dglod/dg.hpp"
#include "dglod/lod.hpp"

namespace dglod {

enum class CoefficientKind { kConstant, kLayered, kHighContrast, kRaster };
enum class Forcing { kCosine, kOne, kZero };

// Plain-text "key = value" configuration of an experiment. Lines starting
// with '#' are comments. See README for the list of keys.
struct ExperimentConfig {
  std::vector<int> coarse_exponents{2, 3, 4};  // H = 2^-i
  int fine_exponent = 6;                       // h = 2^-k

  CoefficientKind coefficient = CoefficientKind::kConstant;
  double constant_value = 1.0;
  int layered_resolution = 64;
  double layered_high = 1.0;
  double layered_low = 0.01;
  int highcontrast_resolution = 64;
  double highcontrast_floor = 0.05;
  double highcontrast_contrast = 4e5;
  std::filesystem::path raster_path;

  Vec2 convection{32.0, 0.0};
  Forcing forcing = Forcing::kCosine;

  double patch_growth = 2.0;
  double patch_log_base = 2.0;
  // Overrides the growth rule: a fixed layer count, or ideal correctors.
  std::optional<Layers> layers_override;

  AssemblyConfig assembly;
  CorrectorMode mode = CorrectorMode::kConvective;
  std::uint64_t seed = 0;
  std::filesystem::path output_dir = "out";

  // Decay study: element index (-1 selects the central cell) and layers
  // (empty selects 0 .. full coverage).
  int decay_element = -1;
  std::vector<int> decay_layers;

  // Wall-clock seconds in CSV output; off keeps CSV files reproducible.
  bool record_wall_time = false;

  // Text the configuration was parsed from, recorded with the results.
  std::string source_text;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::filesystem::path& path);
// Canonical key = value rendering of every field.
std::string render_config(const ExperimentConfig& cfg);

// Checks the invariants that need no I/O beyond file existence.
void validate(const ExperimentConfig& cfg);

CoefficientField make_field(const ExperimentConfig& cfg);
ScalarFunction make_forcing(Forcing forcing);
// Layers used for coarse size 2^-i.
Layers layers_for(const ExperimentConfig& cfg, int coarse_exponent);

}  // namespace dglod
