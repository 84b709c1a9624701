#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "dglod/coeff.hpp"
#include "dglod/error.hpp"

namespace dglod {
namespace {

std::filesystem::path write_temp(const std::string& name,
                                 const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / name;
  std::ofstream(path) << text;
  return path;
}

TEST(Raster, LoadsConstantField) {
  const Raster r = load_raster(write_temp("dglod_a1.txt", "1 1\n1.0\n"));
  EXPECT_EQ(r.nx(), 1);
  EXPECT_EQ(r.ny(), 1);
  EXPECT_EQ(r.min(), 1.0);
  EXPECT_EQ(r.max(), 1.0);
}

TEST(Raster, LoadsLayeredFieldBottomRowFirst) {
  std::ostringstream text;
  text << "64 64\n";
  for (int j = 0; j < 64; ++j) {
    for (int i = 0; i < 64; ++i) text << (j % 2 == 0 ? "1.0" : "0.01") << ' ';
    text << '\n';
  }
  const Raster r = load_raster(write_temp("dglod_a2.txt", text.str()));
  EXPECT_DOUBLE_EQ(r.max() / r.min(), 100.0);
  EXPECT_EQ(r.at(5, 0), 1.0);
  EXPECT_EQ(r.at(5, 1), 0.01);
  EXPECT_EQ(r, make_layered(64, 1.0, 0.01));
}

TEST(Raster, RejectsInvalidFiles) {
  auto bad = [](const std::string& text) {
    std::istringstream in(text);
    return parse_raster(in);
  };
  EXPECT_THROW(bad("2 1\n1.0 0.0\n"), Error);      // zero entry
  EXPECT_THROW(bad("2 1\n1.0 -3\n"), Error);       // negative entry
  EXPECT_THROW(bad("2\n1.0 1.0\n"), Error);        // malformed header
  EXPECT_THROW(bad("2 2\n1.0 1.0\n1.0\n"), Error);  // short row
  EXPECT_THROW(bad("1 2\n1.0\n"), Error);          // missing row
  EXPECT_THROW(bad("1 1\n1.0\n2.0\n"), Error);     // extra row
  EXPECT_THROW(bad("1 1\nabc\n"), Error);
  EXPECT_THROW(load_raster("/nonexistent/raster.txt"), Error);
}

TEST(Raster, WriteThenParseIsIdentity) {
  const Raster r = make_highcontrast(8, 3, 0.05, 4e5);
  std::stringstream s;
  write_raster(s, r);
  EXPECT_EQ(parse_raster(s), r);
}

TEST(MakeLayered, AlternatesRows) {
  const Raster r = make_layered(4, 2.0, 0.5);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(r.at(i, 0), 2.0);
    EXPECT_EQ(r.at(i, 1), 0.5);
    EXPECT_EQ(r.at(i, 2), 2.0);
    EXPECT_EQ(r.at(i, 3), 0.5);
  }
  EXPECT_EQ(r.min(), 0.5);
  EXPECT_EQ(r.max(), 2.0);
  EXPECT_EQ(make_layered(1, 1.0, 1.0), make_constant(1.0));
  EXPECT_THROW(make_layered(4, 0.0, 1.0), Error);
}

TEST(MakeHighContrast, BoundsAndDeterminism) {
  const Raster r = make_highcontrast(64, 0, 0.05, 4e5);
  EXPECT_GE(r.min(), 0.05);
  EXPECT_LE(r.max() / r.min(), 4e5);
  // Log-uniform over 5.6 decades: a 64x64 sample spans most of them.
  EXPECT_GT(r.max() / r.min(), 1e5);
  EXPECT_EQ(make_highcontrast(8, 7, 1.0, 10.0), make_highcontrast(8, 7, 1.0, 10.0));
  EXPECT_FALSE(make_highcontrast(8, 7, 1.0, 10.0) ==
               make_highcontrast(8, 8, 1.0, 10.0));
  const Raster flat = make_highcontrast(4, 1, 0.05, 1.0);
  for (double v : flat.values()) EXPECT_EQ(v, 0.05);
}

TEST(EvalA, PiecewiseConstantLookup) {
  const MeshLevel fine(128);
  const CoefficientField a1{make_constant(1.0), {0.0, 0.0}};
  EXPECT_EQ(eval_A(a1, fine, 0), 1.0);
  EXPECT_EQ(eval_A(a1, fine, 5000), 1.0);
  const CoefficientField a2{make_layered(64, 1.0, 0.01), {0.0, 0.0}};
  // Fine rows 2 and 3 lie in raster row 1, a low row.
  EXPECT_EQ(eval_A(a2, fine, fine.element_index(10, 2)), 0.01);
  EXPECT_EQ(eval_A(a2, fine, fine.element_index(10, 3)), 0.01);
  EXPECT_EQ(eval_A(a2, fine, fine.element_index(10, 4)), 1.0);
  EXPECT_THROW(eval_A(a2, MeshLevel(32), 0), Error);
  EXPECT_EQ(a2.alpha(), 0.01);
  EXPECT_EQ(a2.beta(), 1.0);
}

TEST(EvalA, ConstantOnEachFineElement) {
  const MeshLevel fine(16);
  const CoefficientField f{make_highcontrast(8, 1, 0.05, 100.0), {0.0, 0.0}};
  for (int e = 0; e < fine.num_elements(); ++e) {
    const auto [ix, iy] = fine.element_coords(e);
    EXPECT_EQ(eval_A(f, fine, e), f.diffusion.at(ix / 2, iy / 2));
  }
}

}  // namespace
}  // namespace dglod
