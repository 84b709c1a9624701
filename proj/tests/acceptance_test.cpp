// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion
// and exits nonzero if any fails.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/SparseCholesky>

#include "dglod/experiment.hpp"
#include "oracles.hpp"

namespace {

using namespace dglod;
namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string describe(const ConvergenceResult& r) {
  std::string s = "errors";
  for (const auto& row : r.rows) s += " " + fmt(row.rel_energy_error);
  s += ", slope " + (r.slope ? fmt(*r.slope) : std::string("NA"));
  return s;
}

ConvergenceResult converge(const std::string& text) {
  const ExperimentConfig cfg = parse(text);
  return run_convergence(cfg, {.threads = 1, .log = &std::cerr});
}

bool slope_ok(const ConvergenceResult& r) { return r.slope && *r.slope <= -1.3; }

const std::string kBase = "coarse_exponents = 2,3,4\nfine_exponent = 6\nforcing = cosine\n";

ConvergenceResult c32_cache;

Outcome convergence_rate() {
  c32_cache = converge(kBase + "convection = 32,0\n");
  return {slope_ok(c32_cache), describe(c32_cache)};
}

Outcome convection_robustness() {
  bool pass = slope_ok(c32_cache);
  std::string detail = "C=32: " + describe(c32_cache);
  for (int c : {64, 128}) {
    const auto r = converge(kBase + "convection = " + std::to_string(c) + ",0\n");
    pass = pass && slope_ok(r);
    detail += "; C=" + std::to_string(c) + ": " + describe(r);
  }
  return {pass, detail};
}

Outcome layered() {
  const auto r = converge(kBase +
                          "convection = 1,0\ncoefficient = layered\n"
                          "layered_resolution = 64\nlayered_high = 1\nlayered_low = 0.01\n");
  return {slope_ok(r), describe(r)};
}

Outcome synthetic_contrast() {
  const auto r = converge(
      "coarse_exponents = 2,3\nfine_exponent = 6\nconvection = 512,0\n"
      "coefficient = highcontrast\nhighcontrast_resolution = 64\nseed = 0\n"
      "highcontrast_floor = 0.05\nhighcontrast_contrast = 4e5\n");
  bool pass = r.rows.size() == 2;
  for (std::size_t i = 1; i < r.rows.size(); ++i) {
    pass = pass && r.rows[i].rel_energy_error < r.rows[i - 1].rel_energy_error;
  }
  return {pass, describe(r)};
}

double unit_forcing(double, double) { return 1.0; }

// Ideal multiscale solution for A = 1 and f = 1 from dense matrices: the
// a-orthogonal projection onto the kernel of the coarse L2 projection.
struct DenseIdeal {
  DenseMatrix a, inj, pi, psi;
  Vector load;
};

DenseIdeal dense_ideal(const MeshHierarchy& hier, Vec2 b) {
  const MeshLevel& fine = hier.fine();
  const std::vector<double> ones(static_cast<std::size_t>(fine.num_elements()), 1.0);
  DenseIdeal d;
  d.a = oracle::form_matrix(fine, ones, 10.0, b);
  const DenseMatrix m = oracle::mass_matrix(fine);
  d.inj = oracle::coarse_injection(hier.coarse(), fine);
  d.load = oracle::load_vector(fine, unit_forcing);
  const DenseMatrix c = d.inj.transpose() * m;
  const DenseMatrix z = oracle::kernel_basis(c);
  d.pi = (d.inj.transpose() * m * d.inj).inverse() * c;
  const DenseMatrix f = z * (z.transpose() * d.a * z).inverse() * z.transpose() * d.a;
  d.psi = (DenseMatrix::Identity(d.a.rows(), d.a.cols()) - f) * d.inj;
  return d;
}

Vector dense_ideal_solution(const MeshHierarchy& hier, Vec2 b) {
  const DenseIdeal d = dense_ideal(hier, b);
  return d.psi * (d.psi.transpose() * d.a * d.psi).fullPivLu().solve(d.psi.transpose() * d.load);
}

Outcome ideal_equivalence() {
  // Two settings: L large enough to cover from every element, compared to
  // the global correctors.
  struct Case {
    int coarse, fine;
    Vec2 b;
    Raster a;
  };
  const Case cases[] = {{8, 32, {32.0, 0.0}, make_constant(1.0)},
                        {4, 32, {64.0, 8.0}, make_layered(32, 1.0, 0.01)}};
  double worst = 0.0;
  for (const Case& c : cases) {
    const MeshHierarchy hier(c.coarse, c.fine);
    const CoefficientField field{c.a, c.b};
    const FineProblem p = assemble_fine_problem(hier, field, {}, make_forcing(Forcing::kCosine));
    const CoarseProjection proj = build_projection(hier);
    auto solve = [&](Layers l) {
      const CorrectorBasis basis = compute_correctors(hier, p, proj, l, CorrectorMode::kConvective);
      return solve_multiscale(assemble_multiscale(basis, p.system, p.load), basis).fine;
    };
    const Vector ideal = solve(std::nullopt);
    const Vector local = solve(c.coarse - 1);
    worst = std::max(worst, relative_energy_error(ideal, local, p.norms));
  }
  // The localized route against an ideal solution built densely by the
  // oracle, sharing no code with the library.
  const MeshHierarchy hier(4, 16);
  const Vec2 b{32.0, 0.0};
  const FineProblem p =
      assemble_fine_problem(hier, {make_constant(1.0), b}, {}, make_forcing(Forcing::kOne));
  const CoarseProjection proj = build_projection(hier);
  const CorrectorBasis basis = compute_correctors(hier, p, proj, 3, CorrectorMode::kConvective);
  const Vector local = solve_multiscale(assemble_multiscale(basis, p.system, p.load), basis).fine;
  const Vector dense = dense_ideal_solution(hier, b);
  const double oracle_gap = relative_energy_error(dense, local, p.norms);
  return {std::max(worst, oracle_gap) <= 1e-9,
          "max relative energy discrepancy vs library ideal " + fmt(worst) +
              ", vs dense oracle " + fmt(oracle_gap)};
}

Outcome corrector_decay() {
  bool pass = true;
  std::string detail;
  for (const char* conv : {"0,0", "64,0"}) {
    const ExperimentConfig cfg = parse(std::string("coarse_exponents = 3\nfine_exponent = 5\n") +
                                       "corrector_mode = convective\nconvection = " + conv + "\n");
    const DecayResult r = run_decay(cfg);
    bool monotone = true;
    for (std::size_t i = 1; i < r.rows.size(); ++i) {
      monotone = monotone && r.rows[i].distance <= r.rows[i - 1].distance * (1.0 + 1e-12);
    }
    const double last = r.rows.back().distance;
    const bool gamma_ok = r.gamma && *r.gamma < 1.0;
    if (std::string(conv) == "0,0") {
      pass = pass && monotone && last <= 1e-10 && gamma_ok;
    } else {
      pass = pass && gamma_ok;
    }
    detail += std::string(detail.empty() ? "" : "; ") + "b=[" + conv + "]: distances";
    for (const auto& row : r.rows) detail += " " + fmt(row.distance);
    detail += ", gamma " + (r.gamma ? fmt(*r.gamma) : std::string("NA")) +
              (monotone ? ", non-increasing" : ", NOT monotone");
  }
  return {pass, detail};
}

Outcome operator_properties() {
  const MeshLevel level(64);
  const DGSpace space(level);
  bool pass = true;
  double worst_sym = 0.0;
  for (const Raster& r : {make_constant(1.0), make_layered(64, 1.0, 0.01),
                          make_highcontrast(64, 0, 0.05, 4e5)}) {
    const SparseOperator m = assemble_diffusion(space, {r, {0.0, 0.0}}, {});
    const SparseOperator mt = m.transpose();
    const double sym = max_abs(m - mt) / max_abs(m);
    worst_sym = std::max(worst_sym, sym);
    Eigen::SimplicialLLT<SparseOperator> llt(m);
    pass = pass && sym <= 1e-12 && llt.info() == Eigen::Success;
  }
  std::mt19937_64 rng(0);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst_q = 0.0;
  for (const Vec2 b : {Vec2{32.0, 0.0}, Vec2{128.0, 0.0}, Vec2{512.0, 0.0}, Vec2{1.0, 0.0},
                       Vec2{-20.0, 35.0}}) {
    const SparseOperator a = assemble_convection(space, {make_constant(1.0), b});
    for (int k = 0; k < 100; ++k) {
      Vector v(space.num_dofs());
      for (int i = 0; i < v.size(); ++i) v[i] = u(rng);
      const double q = v.dot(a * v) / v.squaredNorm();
      worst_q = std::min(worst_q, q);
      pass = pass && q >= -1e-12;
    }
  }
  return {pass, "symmetry defect " + fmt(worst_sym) + ", min v^T A_c v / |v|^2 " + fmt(worst_q) +
                    ", Cholesky succeeded on all families"};
}

Outcome projection_properties() {
  double identity = 0.0;
  double worst = 0.0;
  for (const auto& [coarse, fine] : {std::pair{8, 64}, std::pair{4, 32}}) {
    const MeshHierarchy hier(coarse, fine);
    const CoarseProjection proj = build_projection(hier);
    const DenseMatrix pi =
        DenseMatrix(proj.coarse_mass_inverse * proj.constraint * proj.injection);
    identity = std::max(
        identity, (pi - DenseMatrix::Identity(pi.rows(), pi.cols())).cwiseAbs().maxCoeff());
    if (fine > 32) continue;
    const CoefficientField field{make_layered(32, 1.0, 0.01), {32.0, 0.0}};
    const FineProblem p = assemble_fine_problem(hier, field, {}, make_forcing(Forcing::kOne));
    for (Layers l : {Layers{1}, Layers{2}, Layers{}}) {
      for (CorrectorMode mode : {CorrectorMode::kConvective, CorrectorMode::kDiffusionOnly}) {
        const CorrectorBasis basis = compute_correctors(hier, p, proj, l, mode);
        for (int k = 0; k < basis.size(); ++k) {
          worst = std::max(worst, proj.project(Vector(basis.correctors.col(k))).norm());
        }
      }
    }
  }
  return {identity <= 1e-12 && worst <= 1e-10,
          "|Pi_H I - 1|_max " + fmt(identity) + ", max |Pi_H phi| " + fmt(worst)};
}

Outcome oracle_equivalence() {
  const MeshHierarchy hier(2, 8);
  const Vec2 b{1.0, 0.0};
  const CoefficientField field{make_constant(1.0), b};
  const FineProblem p = assemble_fine_problem(hier, field, {}, make_forcing(Forcing::kOne));
  const CoarseProjection proj = build_projection(hier);
  const CorrectorBasis basis =
      compute_correctors(hier, p, proj, std::nullopt, CorrectorMode::kConvective);
  const Vector u_h = solve_reference(p.system, p.load);
  const ScaleSplit split = split_scales(u_h, basis, proj);
  const Vector u_ms = solve_multiscale(assemble_multiscale(basis, p.system, p.load), basis).fine;

  // Dense construction from the oracle alone.
  const MeshLevel& fine = hier.fine();
  const std::vector<double> ones(static_cast<std::size_t>(fine.num_elements()), 1.0);
  const DenseIdeal d = dense_ideal(hier, b);
  const Vector ref = d.a.fullPivLu().solve(d.load);
  const Vector coarse = d.psi * (d.pi * ref);
  const Vector ms =
      d.psi * (d.psi.transpose() * d.a * d.psi).fullPivLu().solve(d.psi.transpose() * d.load);

  auto energy = [&](const Vector& v) {
    return std::sqrt(oracle::energy_diffusion_sq(fine, ones, 10.0, v) +
                     oracle::energy_convection_sq(fine, b, v));
  };
  const double scale = energy(ref);
  const double d_ref = energy(u_h - ref) / scale;
  const double d_coarse = energy(split.coarse - coarse) / scale;
  const double d_fine = energy(split.fine - (ref - coarse)) / scale;
  const double d_ms = energy(u_ms - ms) / scale;
  const double worst = std::max({d_ref, d_coarse, d_fine, d_ms});
  return {worst <= 1e-9, "relative energy discrepancies: u_h " + fmt(d_ref) + ", v_ms " +
                             fmt(d_coarse) + ", v_f " + fmt(d_fine) + ", u_ms " + fmt(d_ms)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "dglod_acceptance_determinism";
  fs::remove_all(root);
  const std::string text =
      "coarse_exponents = 2,3\nfine_exponent = 5\nconvection = 64,0\n"
      "coefficient = highcontrast\nhighcontrast_resolution = 32\nseed = 7\n";
  const std::string decay_text = "coarse_exponents = 3\nfine_exponent = 5\nconvection = 16,4\n";
  std::vector<std::string> conv, decay;
  for (int threads : {1, 2, 1}) {
    ExperimentConfig cfg = parse(text);
    cfg.output_dir = root / ("c" + std::to_string(conv.size()));
    write_convergence_outputs(cfg, run_convergence(cfg, {.threads = threads}));
    conv.push_back(slurp(cfg.output_dir / "convergence.csv") +
                   slurp(cfg.output_dir / "convergence_fit.csv"));
    ExperimentConfig dcfg = parse(decay_text);
    dcfg.output_dir = root / ("d" + std::to_string(decay.size()));
    write_decay_outputs(dcfg, run_decay(dcfg, {.threads = threads}));
    decay.push_back(slurp(dcfg.output_dir / "decay.csv") +
                    slurp(dcfg.output_dir / "decay_fit.csv"));
  }
  fs::remove_all(root);
  const bool pass = !conv[0].empty() && conv[0] == conv[1] && conv[0] == conv[2] &&
                    !decay[0].empty() && decay[0] == decay[1] && decay[0] == decay[2];
  return {pass, pass ? "convergence and decay CSV byte-identical for threads 1, 2, 1"
                     : "CSV output differs between runs"};
}

}  // namespace

// Optional arguments select criteria by number; default runs all.
int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"convergence rate, A=1, b=[32,0]", convergence_rate},
      {"convection robustness, C in {32,64,128}", convection_robustness},
      {"high-contrast layered field, b=[1,0]", layered},
      {"synthetic high contrast, b=[512,0], error decreasing", synthetic_contrast},
      {"full-coverage patches reproduce ideal correctors", ideal_equivalence},
      {"corrector decay", corrector_decay},
      {"operator symmetry, coercivity, upwind positivity", operator_properties},
      {"coarse projection properties", projection_properties},
      {"dense oracle equivalence at N_H=2, N_h=8", oracle_equivalence},
      {"determinism across runs and thread counts", determinism},
  };
  int failures = 0;
  int index = 0;
  for (const auto& [name, check] : criteria) {
    ++index;
    if (!selected.empty() &&
        std::find(selected.begin(), selected.end(), index) == selected.end()) {
      continue;
    }
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::cout << "criterion " << index << ": " << (o.pass ? "PASS" : "FAIL") << "  " << name
              << "  (" << o.detail << "; " << fmt(secs) << " s)" << std::endl;
  }
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " failed")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
