#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "dglod/mesh.hpp"

namespace dglod {

// Cell-centred grid of strictly positive values covering the unit square.
// Row 0 is the bottom row; values are stored row-major.
class Raster {
 public:
  Raster(int nx, int ny, std::vector<double> values);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double at(int ix, int iy) const {
    return values_[static_cast<std::size_t>(iy * nx_ + ix)];
  }
  const std::vector<double>& values() const { return values_; }
  double min() const { return min_; }
  double max() const { return max_; }

  friend bool operator==(const Raster& a, const Raster& b) {
    return a.nx_ == b.nx_ && a.ny_ == b.ny_ && a.values_ == b.values_;
  }

 private:
  int nx_;
  int ny_;
  std::vector<double> values_;
  double min_;
  double max_;
};

using Vec2 = std::array<double, 2>;

// Scalar diffusion A (piecewise constant on a raster) and a constant,
// hence divergence-free, convection vector b.
struct CoefficientField {
  Raster diffusion;
  Vec2 convection{0.0, 0.0};

  double alpha() const { return diffusion.min(); }
  double beta() const { return diffusion.max(); }
};

// Text format: "nx ny" followed by ny rows of nx values, bottom row first.
Raster parse_raster(std::istream& in);
Raster load_raster(const std::filesystem::path& path);
void write_raster(std::ostream& out, const Raster& raster);

Raster make_constant(double value);
// n x n grid whose rows alternate hi, lo, hi, ... from the bottom.
Raster make_layered(int n, double hi, double lo);
// n x n grid of log-uniform samples in [alpha_floor, alpha_floor*contrast).
Raster make_highcontrast(int n, std::uint64_t seed, double alpha_floor,
                         double contrast);

bool resolves(const MeshLevel& level, const Raster& raster);
double eval_A(const CoefficientField& field, const MeshLevel& level,
              int element);
// Diffusion value on every element of `level`.
std::vector<double> sample_diffusion(const CoefficientField& field,
                                     const MeshLevel& level);

}  // namespace dglod
