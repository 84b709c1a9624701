#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dglod/error.hpp"
#include "dglod/experiment.hpp"
#include "dglod/vtk.hpp"

namespace dglod {
namespace {

namespace fs = std::filesystem;

ExperimentConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("dglod_" + name);
  fs::remove_all(p);
  return p;
}

TEST(Convergence, SmallRunProducesCsv) {
  ExperimentConfig cfg = parse("coarse_exponents = 1,2\nfine_exponent = 4\n");
  cfg.output_dir = scratch("conv");
  const ConvergenceResult r = run_convergence(cfg);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].n_dof, 16);
  EXPECT_EQ(r.rows[1].n_dof, 64);
  EXPECT_EQ(r.rows[1].coarse_h, 0.25);
  for (const auto& row : r.rows) {
    EXPECT_GT(row.rel_energy_error, 0.0);
    EXPECT_LT(row.rel_energy_error, 1.0);
    EXPECT_NEAR(std::hypot(row.diffusion_part, row.convection_part), row.rel_energy_error,
                1e-14);
  }
  ASSERT_TRUE(r.slope.has_value());
  write_convergence_outputs(cfg, r);
  const std::string csv = slurp(cfg.output_dir / "convergence.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "H,N_dof,L,rel_energy_error,energy_error_diff_part,energy_error_conv_part,"
            "wall_seconds");
  EXPECT_NE(csv.find("\n0.5,16,1,"), std::string::npos) << csv;
  EXPECT_NE(csv.find(",NA\n"), std::string::npos);
  EXPECT_EQ(slurp(cfg.output_dir / "config.txt"), cfg.source_text);
  EXPECT_EQ(slurp(cfg.output_dir / "convergence_fit.csv").substr(0, 21),
            "quantity,value\nslope,");
  fs::remove_all(cfg.output_dir);
}

TEST(Convergence, OutputIsDeterministic) {
  const ExperimentConfig cfg = parse("coarse_exponents = 1,2\nfine_exponent = 4\n");
  std::ostringstream a, b;
  write_convergence_csv(a, run_convergence(cfg).rows, false);
  write_convergence_csv(b, run_convergence(cfg, {.threads = 2}).rows, false);
  EXPECT_EQ(a.str(), b.str());
}

TEST(Convergence, SlopeNeedsTwoRows) {
  std::vector<ConvergenceRow> rows(1);
  rows[0].n_dof = 16;
  rows[0].rel_energy_error = 0.1;
  EXPECT_FALSE(fit_slope(rows).has_value());
  ConvergenceRow second;
  second.n_dof = 64;
  second.rel_energy_error = 0.0125;
  rows.push_back(second);
  EXPECT_NEAR(*fit_slope(rows), -1.5, 1e-14);
}

TEST(Convergence, ZeroForcingIsRejected) {
  const ExperimentConfig cfg =
      parse("coarse_exponents = 1\nfine_exponent = 3\nforcing = zero\n");
  EXPECT_THROW(run_convergence(cfg), Error);
}

TEST(Convergence, WallTimeColumnWhenRequested) {
  std::vector<ConvergenceRow> rows(1);
  rows[0].coarse_h = 0.25;
  rows[0].n_dof = 64;
  rows[0].layers = Layers{};
  rows[0].wall_seconds = 1.5;
  std::ostringstream out;
  write_convergence_csv(out, rows, true);
  EXPECT_NE(out.str().find("\n0.25,64,ideal,0,0,0,1.5\n"), std::string::npos) << out.str();
}

TEST(Single, ZeroForcingGivesZeroFields) {
  ExperimentConfig cfg =
      parse("coarse_exponents = 1\nfine_exponent = 3\nforcing = zero\n");
  cfg.output_dir = scratch("single_zero");
  const SingleResult r = run_single(cfg);
  EXPECT_EQ(r.reference.norm(), 0.0);
  EXPECT_EQ(r.multiscale.norm(), 0.0);
  EXPECT_EQ(r.row.rel_energy_error, 0.0);
  write_single_outputs(cfg, r);
  for (const char* f : {"single.csv", "reference.vtk", "multiscale.vtk", "difference.vtk"}) {
    EXPECT_TRUE(fs::exists(cfg.output_dir / f)) << f;
  }
  fs::remove_all(cfg.output_dir);
}

TEST(Single, ReportsConvectionSize) {
  const ExperimentConfig cfg =
      parse("coarse_exponents = 3\nfine_exponent = 4\nconvection = 128,0\nlayers = 1\n");
  const SingleResult r = run_single(cfg);
  EXPECT_DOUBLE_EQ(r.row.convection_size, 16.0);
  EXPECT_GT(r.reference_norm, 0.0);
  EXPECT_THROW(run_single(parse("coarse_exponents = 1,2\nfine_exponent = 3\n")), Error);
}

TEST(Decay, DefaultsToCentralElementAndFullRange) {
  ExperimentConfig cfg =
      parse("coarse_exponents = 2\nfine_exponent = 4\nconvection = 0,0\n");
  cfg.output_dir = scratch("decay");
  const DecayResult r = run_decay(cfg);
  EXPECT_EQ(r.element, 5);  // cell (1, 1) of 4x4
  ASSERT_EQ(r.rows.size(), 3u);  // L = 0, 1, 2 covers the domain from (1,1)
  EXPECT_LE(r.rows.back().distance, 1e-10);
  write_decay_outputs(cfg, r);
  const std::string csv = slurp(cfg.output_dir / "decay.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "L,energy_distance");
  EXPECT_EQ(slurp(cfg.output_dir / "decay_fit.csv").substr(0, 21),
            "quantity,value\ngamma,");
  fs::remove_all(cfg.output_dir);
  EXPECT_THROW(run_decay(parse("coarse_exponents = 1,2\nfine_exponent = 3\n")), Error);
  EXPECT_THROW(run_decay(parse("coarse_exponents = 1\nfine_exponent = 3\ndecay_element = 9\n")),
               Error);
}

TEST(Vtk, StructuredPointsLayout) {
  const MeshLevel level(2);
  std::ostringstream out;
  write_vtk(out, level, {{"u", {1.0, 2.0, 3.0, 4.5}}}, "test");
  EXPECT_EQ(out.str(),
            "# vtk DataFile Version 3.0\n"
            "test\n"
            "ASCII\n"
            "DATASET STRUCTURED_POINTS\n"
            "DIMENSIONS 3 3 1\n"
            "ORIGIN 0 0 0\n"
            "SPACING 0.5 0.5 1\n"
            "CELL_DATA 4\n"
            "SCALARS u double 1\n"
            "LOOKUP_TABLE default\n"
            "1\n2\n3\n4.5\n");
  EXPECT_THROW(write_vtk(out, level, {{"u", {1.0}}}), Error);
}

}  // namespace
}  // namespace dglod
