#include "dglod/coeff.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "dglod/error.hpp"

namespace dglod {

Raster::Raster(int nx, int ny, std::vector<double> values)
    : nx_(nx), ny_(ny), values_(std::move(values)) {
  if (nx_ < 1 || ny_ < 1) {
    throw Error("raster: dimensions must be positive");
  }
  if (values_.size() != static_cast<std::size_t>(nx_) * ny_) {
    throw Error("raster: expected " + std::to_string(nx_ * ny_) +
                " values, got " + std::to_string(values_.size()));
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i])) {
      throw Error("raster: value at cell " + std::to_string(i) +
                  " is not a positive finite number");
    }
  }
  const auto [lo, hi] = std::minmax_element(values_.begin(), values_.end());
  min_ = *lo;
  max_ = *hi;
}

Raster parse_raster(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error("raster: missing header line");
  }
  std::istringstream header(line);
  int nx = 0;
  int ny = 0;
  std::string extra;
  if (!(header >> nx >> ny) || (header >> extra)) {
    throw Error("raster: malformed header '" + line + "', expected 'nx ny'");
  }
  if (nx < 1 || ny < 1) {
    throw Error("raster: dimensions must be positive");
  }
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(nx) * ny);
  for (int row = 0; row < ny; ++row) {
    if (!std::getline(in, line)) {
      throw Error("raster: expected " + std::to_string(ny) + " rows, found " +
                  std::to_string(row));
    }
    std::istringstream ls(line);
    std::string token;
    int count = 0;
    while (ls >> token) {
      double v = 0.0;
      const auto* first = token.data();
      const auto* last = token.data() + token.size();
      auto [ptr, ec] = std::from_chars(first, last, v);
      if (ec != std::errc() || ptr != last) {
        throw Error("raster: row " + std::to_string(row) +
                    ": cannot parse '" + token + "'");
      }
      values.push_back(v);
      ++count;
    }
    if (count != nx) {
      throw Error("raster: row " + std::to_string(row) + " has " +
                  std::to_string(count) + " values, expected " +
                  std::to_string(nx));
    }
  }
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") != std::string::npos) {
      throw Error("raster: trailing data after " + std::to_string(ny) +
                  " rows");
    }
  }
  return Raster(nx, ny, std::move(values));
}

Raster load_raster(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("raster: cannot open " + path.string());
  }
  try {
    return parse_raster(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

void write_raster(std::ostream& out, const Raster& raster) {
  out << raster.nx() << ' ' << raster.ny() << '\n';
  char buf[32];
  for (int iy = 0; iy < raster.ny(); ++iy) {
    for (int ix = 0; ix < raster.nx(); ++ix) {
      auto res = std::to_chars(buf, buf + sizeof buf, raster.at(ix, iy));
      if (ix > 0) out << ' ';
      out.write(buf, res.ptr - buf);
    }
    out << '\n';
  }
}

Raster make_constant(double value) { return Raster(1, 1, {value}); }

Raster make_layered(int n, double hi, double lo) {
  if (n < 1) {
    throw Error("make_layered: resolution must be positive");
  }
  if (!(hi > 0.0) || !(lo > 0.0)) {
    throw Error("make_layered: values must be positive");
  }
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  for (int iy = 0; iy < n; ++iy) {
    std::fill_n(values.begin() + static_cast<std::ptrdiff_t>(iy) * n, n,
                iy % 2 == 0 ? hi : lo);
  }
  return Raster(n, n, std::move(values));
}

Raster make_highcontrast(int n, std::uint64_t seed, double alpha_floor,
                         double contrast) {
  if (n < 1) {
    throw Error("make_highcontrast: resolution must be positive");
  }
  if (!(alpha_floor > 0.0)) {
    throw Error("make_highcontrast: floor must be positive");
  }
  if (!(contrast >= 1.0)) {
    throw Error("make_highcontrast: contrast must be at least 1");
  }
  // mt19937_64 output is fixed by the standard; the uniform variate is
  // formed by hand so the field does not depend on the library's
  // distribution implementation.
  std::mt19937_64 rng(seed);
  const double log_contrast = std::log(contrast);
  std::vector<double> values(static_cast<std::size_t>(n) * n);
  for (double& v : values) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    v = alpha_floor * std::exp(u * log_contrast);
  }
  return Raster(n, n, std::move(values));
}

bool resolves(const MeshLevel& level, const Raster& raster) {
  const int n = level.cells_per_axis();
  return n % raster.nx() == 0 && n % raster.ny() == 0;
}

double eval_A(const CoefficientField& field, const MeshLevel& level,
              int element) {
  const Raster& r = field.diffusion;
  if (!resolves(level, r)) {
    throw Error("coefficient raster " + std::to_string(r.nx()) + "x" +
                std::to_string(r.ny()) + " is not resolved by a " +
                std::to_string(level.cells_per_axis()) + "-cell mesh");
  }
  const int n = level.cells_per_axis();
  const auto [ix, iy] = level.element_coords(element);
  return r.at(ix / (n / r.nx()), iy / (n / r.ny()));
}

std::vector<double> sample_diffusion(const CoefficientField& field,
                                     const MeshLevel& level) {
  std::vector<double> out(static_cast<std::size_t>(level.num_elements()));
  for (int e = 0; e < level.num_elements(); ++e) {
    out[static_cast<std::size_t>(e)] = eval_A(field, level, e);
  }
  return out;
}

}  // namespace dglod
