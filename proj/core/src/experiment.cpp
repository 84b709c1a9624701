#include "dglod/experiment.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include "dglod/error.hpp"
#include "dglod/vtk.hpp"

namespace dglod {
namespace {

using Clock = std::chrono::steady_clock;

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string layers_text(const Layers& l) {
  return l ? std::to_string(*l) : std::string("ideal");
}

template <typename F>
auto stage(const char* name, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(std::string(name) + " failed: " + e.what());
  }
}

void log(const RunOptions& opts, const std::string& msg) {
  if (opts.log) *opts.log << msg << std::endl;
}

// Fine data shared by every coarse level of a run.
struct FineSetup {
  CoefficientField field;
  FineProblem problem;
  Vector reference;
  double reference_norm = 0.0;
};

FineSetup prepare_fine(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate(cfg);
  FineSetup s{stage("coefficient setup", [&] { return make_field(cfg); }), {},
              {}, 0.0};
  const int n_fine = 1 << cfg.fine_exponent;
  const MeshHierarchy fine_only(n_fine, n_fine);
  s.problem = stage("fine assembly", [&] {
    return assemble_fine_problem(fine_only, s.field, cfg.assembly,
                                 make_forcing(cfg.forcing));
  });
  s.reference = stage("reference solve", [&] {
    return solve_reference(s.problem.system, s.problem.load);
  });
  s.reference_norm = energy_norm(s.reference, s.problem.norms);
  log(opts, "reference: h = 2^-" + std::to_string(cfg.fine_exponent) +
                ", dofs = " + std::to_string(s.reference.size()) +
                ", energy norm = " + num(s.reference_norm));
  return s;
}

struct LevelResult {
  ConvergenceRow row;
  Vector multiscale;
};

LevelResult solve_level(const ExperimentConfig& cfg, const FineSetup& fine,
                        int coarse_exponent, const RunOptions& opts) {
  const auto start = Clock::now();
  const MeshHierarchy hier(1 << coarse_exponent, 1 << cfg.fine_exponent);
  const Layers layers = layers_for(cfg, coarse_exponent);
  const CoarseProjection proj =
      stage("projection", [&] { return build_projection(hier); });
  const CorrectorBasis basis = stage("corrector computation", [&] {
    return compute_correctors(hier, fine.problem, proj, layers, cfg.mode,
                              opts.threads);
  });
  const MultiscaleSystem sys = stage("multiscale assembly", [&] {
    return assemble_multiscale(basis, fine.problem.system, fine.problem.load);
  });
  const MultiscaleSolution sol =
      stage("multiscale solve", [&] { return solve_multiscale(sys, basis); });
  const double elapsed =
      std::chrono::duration<double>(Clock::now() - start).count();

  LevelResult out;
  ConvergenceRow& r = out.row;
  r.coarse_exponent = coarse_exponent;
  r.coarse_h = hier.coarse().cell_size();
  r.n_dof = proj.coarse_dofs();
  r.layers = layers;
  const Vector err = fine.reference - sol.fine;
  if (fine.reference_norm > 0.0) {
    r.diffusion_part = seminorm(err, fine.problem.norms.diffusion) /
                       fine.reference_norm;
    r.convection_part = seminorm(err, fine.problem.norms.convection) /
                        fine.reference_norm;
    r.rel_energy_error = std::hypot(r.diffusion_part, r.convection_part);
  }
  r.wall_seconds = elapsed;
  r.convection_size = convection_size(hier, fine.field);
  out.multiscale = sol.fine;
  log(opts, "H = 2^-" + std::to_string(coarse_exponent) +
                "  N_dof = " + std::to_string(r.n_dof) +
                "  L = " + layers_text(layers) +
                "  rel. energy error = " + num(r.rel_energy_error) +
                "  |Hb|/alpha = " + num(r.convection_size) +
                "  time = " + num(elapsed) + " s");
  return out;
}

void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    throw Error("cannot create output directory " + dir.string() + ": " +
                ec.message());
  }
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

void write_config_record(const ExperimentConfig& cfg) {
  auto out = open_out(cfg.output_dir / "config.txt");
  out << (cfg.source_text.empty() ? render_config(cfg) : cfg.source_text);
}

void write_fit(const std::filesystem::path& path, const char* quantity,
               const std::optional<double>& value) {
  auto out = open_out(path);
  out << "quantity,value\n"
      << quantity << ',' << (value ? num(*value) : std::string("NA")) << '\n';
}

}  // namespace

std::optional<double> fit_slope(const std::vector<ConvergenceRow>& rows) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const auto& r : rows) {
    if (!(r.rel_energy_error > 0.0)) continue;
    const double x = std::log(static_cast<double>(r.n_dof));
    const double y = std::log(r.rel_energy_error);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

ConvergenceResult run_convergence(const ExperimentConfig& cfg,
                                  const RunOptions& opts) {
  const FineSetup fine = prepare_fine(cfg, opts);
  if (fine.reference_norm == 0.0) {
    throw Error("convergence: reference solution is zero; relative errors "
                "are undefined");
  }
  ConvergenceResult result;
  for (int i : cfg.coarse_exponents) {
    result.rows.push_back(solve_level(cfg, fine, i, opts).row);
  }
  result.slope = fit_slope(result.rows);
  log(opts, "fitted slope: " +
                (result.slope ? num(*result.slope) : std::string("NA")));
  return result;
}

DecayResult run_decay(const ExperimentConfig& cfg, const RunOptions& opts) {
  validate(cfg);
  if (cfg.coarse_exponents.size() != 1) {
    throw Error("decay: exactly one coarse exponent is required");
  }
  DecayResult result;
  result.coarse_exponent = cfg.coarse_exponents.front();
  const CoefficientField field =
      stage("coefficient setup", [&] { return make_field(cfg); });
  const MeshHierarchy hier(1 << result.coarse_exponent,
                           1 << cfg.fine_exponent);
  const int n = hier.coarse().cells_per_axis();
  result.element = cfg.decay_element >= 0
                       ? cfg.decay_element
                       : hier.coarse().element_index((n - 1) / 2, (n - 1) / 2);
  if (result.element >= hier.coarse().num_elements()) {
    throw Error("decay: element " + std::to_string(result.element) +
                " is outside the coarse mesh");
  }
  std::vector<int> layers = cfg.decay_layers;
  if (layers.empty()) {
    for (int l = 0; l <= layers_to_cover(hier.coarse(), result.element); ++l) {
      layers.push_back(l);
    }
  }
  const FineProblem problem = stage("fine assembly", [&] {
    return assemble_fine_problem(hier, field, cfg.assembly,
                                 make_forcing(cfg.forcing));
  });
  const CoarseProjection proj = build_projection(hier);
  result.rows = stage("decay profile", [&] {
    return corrector_decay_profile(hier, problem, proj, cfg.mode,
                                   result.element, layers);
  });
  result.gamma = fit_decay_rate(result.rows);
  for (const auto& r : result.rows) {
    log(opts, "L = " + std::to_string(r.layers) +
                  "  |||phi - phi^L||| = " + num(r.distance));
  }
  log(opts, "fitted gamma: " +
                (result.gamma ? num(*result.gamma) : std::string("NA")));
  return result;
}

SingleResult run_single(const ExperimentConfig& cfg, const RunOptions& opts) {
  if (cfg.coarse_exponents.size() != 1) {
    throw Error("single: exactly one coarse exponent is required");
  }
  const FineSetup fine = prepare_fine(cfg, opts);
  LevelResult level =
      solve_level(cfg, fine, cfg.coarse_exponents.front(), opts);
  SingleResult result;
  result.row = level.row;
  result.reference_norm = fine.reference_norm;
  result.multiscale_norm = energy_norm(level.multiscale, fine.problem.norms);
  result.reference = fine.reference;
  result.multiscale = std::move(level.multiscale);
  log(opts, "energy norm: reference = " + num(result.reference_norm) +
                ", multiscale = " + num(result.multiscale_norm));
  log(opts, "convection size |Hb|/alpha = " + num(result.row.convection_size));
  return result;
}

void write_convergence_csv(std::ostream& out,
                           const std::vector<ConvergenceRow>& rows,
                           bool record_wall_time) {
  out << "H,N_dof,L,rel_energy_error,energy_error_diff_part,"
         "energy_error_conv_part,wall_seconds\n";
  for (const auto& r : rows) {
    out << num(r.coarse_h) << ',' << r.n_dof << ',' << layers_text(r.layers)
        << ',' << num(r.rel_energy_error) << ',' << num(r.diffusion_part)
        << ',' << num(r.convection_part) << ','
        << (record_wall_time ? num(r.wall_seconds) : std::string("NA"))
        << '\n';
  }
}

void write_decay_csv(std::ostream& out, const DecayResult& result) {
  out << "L,energy_distance\n";
  for (const auto& r : result.rows) {
    out << r.layers << ',' << num(r.distance) << '\n';
  }
}

void write_convergence_outputs(const ExperimentConfig& cfg,
                               const ConvergenceResult& result) {
  ensure_dir(cfg.output_dir);
  write_config_record(cfg);
  auto out = open_out(cfg.output_dir / "convergence.csv");
  write_convergence_csv(out, result.rows, cfg.record_wall_time);
  write_fit(cfg.output_dir / "convergence_fit.csv", "slope", result.slope);
}

void write_decay_outputs(const ExperimentConfig& cfg,
                         const DecayResult& result) {
  ensure_dir(cfg.output_dir);
  write_config_record(cfg);
  auto out = open_out(cfg.output_dir / "decay.csv");
  write_decay_csv(out, result);
  write_fit(cfg.output_dir / "decay_fit.csv", "gamma", result.gamma);
}

void write_single_outputs(const ExperimentConfig& cfg,
                          const SingleResult& result) {
  ensure_dir(cfg.output_dir);
  write_config_record(cfg);
  {
    auto out = open_out(cfg.output_dir / "single.csv");
    write_convergence_csv(out, {result.row}, cfg.record_wall_time);
  }
  const MeshLevel fine(1 << cfg.fine_exponent);
  const DGSpace space(fine);
  const auto ref = cell_averages(space, result.reference);
  const auto ms = cell_averages(space, result.multiscale);
  std::vector<double> diff(ref.size());
  for (std::size_t i = 0; i < ref.size(); ++i) diff[i] = ref[i] - ms[i];
  write_vtk(cfg.output_dir / "reference.vtk", fine, {{"u_h", ref}},
            "reference solution");
  write_vtk(cfg.output_dir / "multiscale.vtk", fine, {{"u_ms", ms}},
            "multiscale solution");
  write_vtk(cfg.output_dir / "difference.vtk", fine, {{"u_h_minus_u_ms", diff}},
            "reference minus multiscale");
}

}  // namespace dglod
