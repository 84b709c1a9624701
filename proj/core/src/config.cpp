#include "dglod/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <numbers>
#include <sstream>

#include "dglod/error.hpp"

namespace dglod {
namespace {

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> split_list(const std::string& value) {
  std::string v = value;
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream in(v);
  std::vector<std::string> out;
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

double to_double(const std::string& key, const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw Error("config: key '" + key + "': '" + s + "' is not a number");
  }
  return v;
}

long long to_integer(const std::string& key, const std::string& s) {
  long long v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error("config: key '" + key + "': '" + s + "' is not an integer");
  }
  return v;
}

int to_int(const std::string& key, const std::string& s) {
  return static_cast<int>(to_integer(key, s));
}

std::vector<int> to_int_list(const std::string& key, const std::string& s) {
  std::vector<int> out;
  for (const auto& tok : split_list(s)) out.push_back(to_int(key, tok));
  return out;
}

bool to_bool(const std::string& key, const std::string& s) {
  if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "off" || s == "no" || s == "0") return false;
  throw Error("config: key '" + key + "': '" + s + "' is not a boolean");
}

std::string fmt(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(v[i]);
  }
  return s;
}

void set_key(ExperimentConfig& c, const std::string& key,
             const std::string& value) {
  if (key == "coarse_exponents") {
    c.coarse_exponents = to_int_list(key, value);
  } else if (key == "fine_exponent") {
    c.fine_exponent = to_int(key, value);
  } else if (key == "coefficient") {
    if (value == "constant") c.coefficient = CoefficientKind::kConstant;
    else if (value == "layered") c.coefficient = CoefficientKind::kLayered;
    else if (value == "highcontrast") c.coefficient = CoefficientKind::kHighContrast;
    else if (value == "raster") c.coefficient = CoefficientKind::kRaster;
    else throw Error("config: unknown coefficient '" + value + "'");
  } else if (key == "constant_value") {
    c.constant_value = to_double(key, value);
  } else if (key == "layered_resolution") {
    c.layered_resolution = to_int(key, value);
  } else if (key == "layered_high") {
    c.layered_high = to_double(key, value);
  } else if (key == "layered_low") {
    c.layered_low = to_double(key, value);
  } else if (key == "highcontrast_resolution") {
    c.highcontrast_resolution = to_int(key, value);
  } else if (key == "highcontrast_floor") {
    c.highcontrast_floor = to_double(key, value);
  } else if (key == "highcontrast_contrast") {
    c.highcontrast_contrast = to_double(key, value);
  } else if (key == "raster_path") {
    c.raster_path = value;
  } else if (key == "convection") {
    const auto parts = split_list(value);
    if (parts.size() != 2) {
      throw Error("config: convection needs two components, got '" + value +
                  "'");
    }
    c.convection = {to_double(key, parts[0]), to_double(key, parts[1])};
  } else if (key == "forcing") {
    if (value == "cosine") c.forcing = Forcing::kCosine;
    else if (value == "one") c.forcing = Forcing::kOne;
    else if (value == "zero") c.forcing = Forcing::kZero;
    else throw Error("config: unknown forcing '" + value + "'");
  } else if (key == "patch_growth") {
    c.patch_growth = to_double(key, value);
  } else if (key == "patch_log_base") {
    c.patch_log_base = value == "e" ? std::numbers::e : to_double(key, value);
  } else if (key == "layers") {
    if (value == "auto") c.layers_override.reset();
    else if (value == "ideal") c.layers_override = Layers{};
    else c.layers_override = Layers{to_int(key, value)};
  } else if (key == "sigma_scale") {
    c.assembly.sigma_scale = to_double(key, value);
  } else if (key == "load_points") {
    c.assembly.load_points = to_int(key, value);
  } else if (key == "corrector_mode") {
    if (value == "convective") c.mode = CorrectorMode::kConvective;
    else if (value == "diffusion") c.mode = CorrectorMode::kDiffusionOnly;
    else throw Error("config: unknown corrector_mode '" + value + "'");
  } else if (key == "seed") {
    const long long s = to_integer(key, value);
    if (s < 0) throw Error("config: seed must be non-negative");
    c.seed = static_cast<std::uint64_t>(s);
  } else if (key == "output_dir") {
    c.output_dir = value;
  } else if (key == "decay_element") {
    c.decay_element = value == "center" ? -1 : to_int(key, value);
  } else if (key == "decay_layers") {
    c.decay_layers = value == "auto" ? std::vector<int>{} : to_int_list(key, value);
  } else if (key == "record_wall_time") {
    c.record_wall_time = to_bool(key, value);
  } else {
    throw Error("config: unknown key '" + key + "'");
  }
}

}  // namespace

ExperimentConfig parse_config(std::istream& in) {
  ExperimentConfig c;
  std::ostringstream text;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    text << line << '\n';
    const std::string body = trim(line.substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error("config: line " + std::to_string(lineno) +
                  ": expected 'key = value'");
    }
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw Error("config: line " + std::to_string(lineno) +
                  ": empty key or value");
    }
    try {
      set_key(c, key, value);
    } catch (const Error& e) {
      throw Error("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  c.source_text = text.str();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open " + path.string());
  try {
    return parse_config(in);
  } catch (const Error& e) {
    throw Error(path.string() + ": " + e.what());
  }
}

std::string render_config(const ExperimentConfig& c) {
  std::ostringstream o;
  const char* coeff[] = {"constant", "layered", "highcontrast", "raster"};
  const char* forcing[] = {"cosine", "one", "zero"};
  o << "coarse_exponents = " << join(c.coarse_exponents) << '\n'
    << "fine_exponent = " << c.fine_exponent << '\n'
    << "coefficient = " << coeff[static_cast<int>(c.coefficient)] << '\n'
    << "constant_value = " << fmt(c.constant_value) << '\n'
    << "layered_resolution = " << c.layered_resolution << '\n'
    << "layered_high = " << fmt(c.layered_high) << '\n'
    << "layered_low = " << fmt(c.layered_low) << '\n'
    << "highcontrast_resolution = " << c.highcontrast_resolution << '\n'
    << "highcontrast_floor = " << fmt(c.highcontrast_floor) << '\n'
    << "highcontrast_contrast = " << fmt(c.highcontrast_contrast) << '\n';
  if (!c.raster_path.empty()) {
    o << "raster_path = " << c.raster_path.string() << '\n';
  }
  o << "convection = " << fmt(c.convection[0]) << ',' << fmt(c.convection[1])
    << '\n'
    << "forcing = " << forcing[static_cast<int>(c.forcing)] << '\n'
    << "patch_growth = " << fmt(c.patch_growth) << '\n'
    << "patch_log_base = " << fmt(c.patch_log_base) << '\n'
    << "layers = ";
  if (!c.layers_override) o << "auto";
  else if (!*c.layers_override) o << "ideal";
  else o << **c.layers_override;
  o << '\n'
    << "sigma_scale = " << fmt(c.assembly.sigma_scale) << '\n'
    << "load_points = " << c.assembly.load_points << '\n'
    << "corrector_mode = "
    << (c.mode == CorrectorMode::kConvective ? "convective" : "diffusion")
    << '\n'
    << "seed = " << c.seed << '\n'
    << "output_dir = " << c.output_dir.string() << '\n'
    << "decay_element = ";
  if (c.decay_element < 0) o << "center";
  else o << c.decay_element;
  o << '\n' << "decay_layers = "
    << (c.decay_layers.empty() ? std::string("auto") : join(c.decay_layers))
    << '\n'
    << "record_wall_time = " << (c.record_wall_time ? "true" : "false")
    << '\n';
  return o.str();
}

void validate(const ExperimentConfig& c) {
  if (c.coarse_exponents.empty()) {
    throw Error("config: coarse_exponents is empty");
  }
  if (c.fine_exponent < 0 || c.fine_exponent > 12) {
    throw Error("config: fine_exponent must lie in [0, 12]");
  }
  for (int i : c.coarse_exponents) {
    if (i < 0) throw Error("config: coarse exponents must be non-negative");
    if (i > c.fine_exponent) {
      throw Error("config: coarse exponent " + std::to_string(i) +
                  " exceeds fine exponent " + std::to_string(c.fine_exponent));
    }
  }
  if (!(c.assembly.sigma_scale > 0.0)) {
    throw Error("config: sigma_scale must be positive");
  }
  if (c.assembly.load_points < 1) {
    throw Error("config: load_points must be positive");
  }
  if (!(c.patch_log_base > 1.0)) {
    throw Error("config: patch_log_base must exceed 1");
  }
  if (c.patch_growth < 0.0) {
    throw Error("config: patch_growth must be non-negative");
  }
  if (c.layers_override && *c.layers_override && **c.layers_override < 0) {
    throw Error("config: layers must be non-negative");
  }
  if (c.coefficient == CoefficientKind::kRaster) {
    if (c.raster_path.empty()) {
      throw Error("config: coefficient = raster requires raster_path");
    }
    if (!std::filesystem::exists(c.raster_path)) {
      throw Error("config: raster file " + c.raster_path.string() +
                  " does not exist");
    }
  }
}

CoefficientField make_field(const ExperimentConfig& c) {
  CoefficientField f{make_constant(1.0), c.convection};
  switch (c.coefficient) {
    case CoefficientKind::kConstant:
      f.diffusion = make_constant(c.constant_value);
      break;
    case CoefficientKind::kLayered:
      f.diffusion = make_layered(c.layered_resolution, c.layered_high,
                                 c.layered_low);
      break;
    case CoefficientKind::kHighContrast:
      f.diffusion = make_highcontrast(c.highcontrast_resolution, c.seed,
                                      c.highcontrast_floor,
                                      c.highcontrast_contrast);
      break;
    case CoefficientKind::kRaster:
      f.diffusion = load_raster(c.raster_path);
      break;
  }
  return f;
}

ScalarFunction make_forcing(Forcing forcing) {
  switch (forcing) {
    case Forcing::kCosine:
      return [](double x, double y) {
        return 1.0 + std::cos(2.0 * std::numbers::pi * x) *
                         std::cos(2.0 * std::numbers::pi * y);
      };
    case Forcing::kOne:
      return [](double, double) { return 1.0; };
    case Forcing::kZero:
      break;
  }
  return [](double, double) { return 0.0; };
}

Layers layers_for(const ExperimentConfig& c, int coarse_exponent) {
  if (c.layers_override) return *c.layers_override;
  if (coarse_exponent == 0) return 0;
  return patch_layers_for(std::ldexp(1.0, -coarse_exponent), c.patch_growth,
                          c.patch_log_base);
}

}  // namespace dglod
