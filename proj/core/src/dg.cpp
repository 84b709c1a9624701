#include "dglod/dg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dglod/error.hpp"
#include "dglod/quadrature.hpp"

namespace dglod {

double q1_value(int corner, double s, double t) {
  const double sx = (corner & 1) ? s : 1.0 - s;
  const double ty = (corner & 2) ? t : 1.0 - t;
  return sx * ty;
}

std::array<double, 2> q1_gradient(int corner, double s, double t) {
  const double sx = (corner & 1) ? s : 1.0 - s;
  const double ty = (corner & 2) ? t : 1.0 - t;
  const double dsx = (corner & 1) ? 1.0 : -1.0;
  const double dty = (corner & 2) ? 1.0 : -1.0;
  return {dsx * ty, sx * dty};
}

double evaluate(const DGSpace& space, const Vector& v, int element, Point p) {
  const MeshLevel& level = space.level();
  const Point o = level.element_origin(element);
  const double h = level.cell_size();
  const double s = (p.x - o.x) / h;
  const double t = (p.y - o.y) / h;
  double sum = 0.0;
  for (int k = 0; k < kCornersPerCell; ++k) {
    sum += v[DGSpace::dof(element, k)] * q1_value(k, s, t);
  }
  return sum;
}

namespace {

constexpr int kMaxSide = 2 * kCornersPerCell;

// Basis traces of the (one or two) elements adjacent to an edge at one
// quadrature point. Entries 0..3 belong to the minus element, 4..7 to the
// plus element.
struct EdgeTrace {
  int count = 0;
  int dof[kMaxSide] = {};
  double value[kMaxSide] = {};
  double normal_derivative[kMaxSide] = {};  // nu . grad(basis)
  bool plus_side[kMaxSide] = {};
};

void add_side(EdgeTrace& tr, const MeshLevel& level, int element, Point p,
              Point normal, bool plus) {
  const Point o = level.element_origin(element);
  const double h = level.cell_size();
  const double s = std::clamp((p.x - o.x) / h, 0.0, 1.0);
  const double t = std::clamp((p.y - o.y) / h, 0.0, 1.0);
  for (int k = 0; k < kCornersPerCell; ++k) {
    const int slot = tr.count++;
    const auto g = q1_gradient(k, s, t);
    tr.dof[slot] = DGSpace::dof(element, k);
    tr.value[slot] = q1_value(k, s, t);
    tr.normal_derivative[slot] = (normal.x * g[0] + normal.y * g[1]) / h;
    tr.plus_side[slot] = plus;
  }
}

EdgeTrace trace_at(const MeshLevel& level, const Edge& e, double tau) {
  const Point p{e.start.x + tau * (e.end.x - e.start.x),
                e.start.y + tau * (e.end.y - e.start.y)};
  EdgeTrace tr;
  add_side(tr, level, e.minus, p, e.normal, false);
  if (!e.on_boundary()) add_side(tr, level, e.plus, p, e.normal, true);
  return tr;
}

// [v] = v- - v+ in the interior, v on the boundary.
double jump_weight(const EdgeTrace& tr, int a) {
  return tr.plus_side[a] ? -tr.value[a] : tr.value[a];
}

double negative_part(double x) { return 0.5 * (std::abs(x) - x); }

void check_resolution(const DGSpace& space, const CoefficientField& field) {
  if (!resolves(space.level(), field.diffusion)) {
    throw Error("assembly: coefficient raster " +
                std::to_string(field.diffusion.nx()) + "x" +
                std::to_string(field.diffusion.ny()) +
                " is not resolved by the " +
                std::to_string(space.level().cells_per_axis()) +
                "-cell mesh");
  }
}

double penalty(const Edge& e, const std::vector<double>& a,
               const AssemblyConfig& cfg) {
  double amax = a[static_cast<std::size_t>(e.minus)];
  if (!e.on_boundary()) {
    amax = std::max(amax, a[static_cast<std::size_t>(e.plus)]);
  }
  return cfg.sigma_scale * amax / e.length;
}

void add_volume_stiffness(std::vector<Triplet>& t, const MeshLevel& level,
                          const std::vector<double>& a) {
  const QuadratureRule q = gauss_legendre(2);
  for (int e = 0; e < level.num_elements(); ++e) {
    double local[4][4] = {};
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      for (std::size_t j = 0; j < q.points.size(); ++j) {
        const double w = q.weights[i] * q.weights[j];
        std::array<double, 2> g[4];
        for (int k = 0; k < 4; ++k) g[k] = q1_gradient(k, q.points[i], q.points[j]);
        for (int r = 0; r < 4; ++r) {
          for (int c = 0; c < 4; ++c) {
            local[r][c] += w * (g[r][0] * g[c][0] + g[r][1] * g[c][1]);
          }
        }
      }
    }
    // In 2D the stiffness of a square cell does not depend on its size.
    const double ae = a[static_cast<std::size_t>(e)];
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        t.emplace_back(DGSpace::dof(e, r), DGSpace::dof(e, c), ae * local[r][c]);
      }
    }
  }
}

// Adds (sigma_e/h_e)([u],[v]) and, when `consistency` is set, the two
// symmetric consistency terms.
void add_edge_diffusion(std::vector<Triplet>& t, const MeshLevel& level,
                        const std::vector<double>& a,
                        const AssemblyConfig& cfg, bool consistency) {
  const QuadratureRule q = gauss_legendre(2);
  for (const Edge& e : level.edges()) {
    const double pen = penalty(e, a, cfg);
    double local[kMaxSide][kMaxSide] = {};
    int count = 0;
    int dofs[kMaxSide] = {};
    for (std::size_t qi = 0; qi < q.points.size(); ++qi) {
      const EdgeTrace tr = trace_at(level, e, q.points[qi]);
      const double w = q.weights[qi] * e.length;
      count = tr.count;
      double jump[kMaxSide];
      double flux[kMaxSide];  // {nu . A grad(basis)}
      for (int k = 0; k < tr.count; ++k) {
        dofs[k] = tr.dof[k];
        jump[k] = jump_weight(tr, k);
        const int owner = tr.plus_side[k] ? e.plus : e.minus;
        const double avg = e.on_boundary() ? 1.0 : 0.5;
        flux[k] = avg * a[static_cast<std::size_t>(owner)] *
                  tr.normal_derivative[k];
      }
      for (int r = 0; r < tr.count; ++r) {
        for (int c = 0; c < tr.count; ++c) {
          double v = pen * jump[c] * jump[r];
          if (consistency) v -= flux[c] * jump[r] + flux[r] * jump[c];
          local[r][c] += w * v;
        }
      }
    }
    for (int r = 0; r < count; ++r) {
      for (int c = 0; c < count; ++c) {
        t.emplace_back(dofs[r], dofs[c], local[r][c]);
      }
    }
  }
}

}  // namespace

SparseOperator assemble_diffusion(const DGSpace& space,
                                  const CoefficientField& field,
                                  const AssemblyConfig& cfg) {
  check_resolution(space, field);
  const MeshLevel& level = space.level();
  const auto a = sample_diffusion(field, level);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(16 * level.num_elements() +
                                     64 * level.num_edges()));
  add_volume_stiffness(t, level, a);
  add_edge_diffusion(t, level, a, cfg, true);
  return from_triplets(space.num_dofs(), space.num_dofs(), t);
}

SparseOperator assemble_convection(const DGSpace& space,
                                   const CoefficientField& field) {
  const MeshLevel& level = space.level();
  const Vec2 b = field.convection;
  const double h = level.cell_size();
  const QuadratureRule q = gauss_legendre(2);
  std::vector<Triplet> t;
  if (b[0] == 0.0 && b[1] == 0.0) {
    return from_triplets(space.num_dofs(), space.num_dofs(), t);
  }
  t.reserve(static_cast<std::size_t>(16 * level.num_elements() +
                                     64 * level.num_edges()));

  // (b . grad u, v) on each cell.
  for (int e = 0; e < level.num_elements(); ++e) {
    double local[4][4] = {};
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      for (std::size_t j = 0; j < q.points.size(); ++j) {
        const double s = q.points[i];
        const double tt = q.points[j];
        const double w = q.weights[i] * q.weights[j] * h;
        for (int r = 0; r < 4; ++r) {
          const double phi = q1_value(r, s, tt);
          for (int c = 0; c < 4; ++c) {
            const auto g = q1_gradient(c, s, tt);
            local[r][c] += w * (b[0] * g[0] + b[1] * g[1]) * phi;
          }
        }
      }
    }
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        t.emplace_back(DGSpace::dof(e, r), DGSpace::dof(e, c), local[r][c]);
      }
    }
  }

  // Upwind stabilisation and coupling in the interior, inflow on the
  // boundary.
  for (const Edge& e : level.edges()) {
    const double bn = b[0] * e.normal.x + b[1] * e.normal.y;
    const double be = 0.5 * std::abs(bn);
    double local[kMaxSide][kMaxSide] = {};
    int count = 0;
    int dofs[kMaxSide] = {};
    for (std::size_t qi = 0; qi < q.points.size(); ++qi) {
      const EdgeTrace tr = trace_at(level, e, q.points[qi]);
      const double w = q.weights[qi] * e.length;
      count = tr.count;
      for (int k = 0; k < tr.count; ++k) dofs[k] = tr.dof[k];
      for (int r = 0; r < tr.count; ++r) {
        for (int c = 0; c < tr.count; ++c) {
          double v = 0.0;
          if (e.on_boundary()) {
            v = negative_part(bn) * tr.value[c] * tr.value[r];
          } else {
            const double jc = jump_weight(tr, c);
            const double jr = jump_weight(tr, r);
            v = be * jc * jr - bn * jc * 0.5 * tr.value[r];
          }
          local[r][c] += w * v;
        }
      }
    }
    for (int r = 0; r < count; ++r) {
      for (int c = 0; c < count; ++c) {
        t.emplace_back(dofs[r], dofs[c], local[r][c]);
      }
    }
  }
  return from_triplets(space.num_dofs(), space.num_dofs(), t);
}

SparseOperator assemble_mass(const DGSpace& space) {
  const MeshLevel& level = space.level();
  const double area = level.cell_size() * level.cell_size();
  // Exact Q1 mass on a square: area/36 * [4 2 2 1; 2 4 1 2; 2 1 4 2; 1 2 2 4].
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(16 * level.num_elements()));
  for (int e = 0; e < level.num_elements(); ++e) {
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        const int differing = __builtin_popcount(static_cast<unsigned>(r ^ c));
        const double w = differing == 0 ? 4.0 : (differing == 1 ? 2.0 : 1.0);
        t.emplace_back(DGSpace::dof(e, r), DGSpace::dof(e, c), area * w / 36.0);
      }
    }
  }
  return from_triplets(space.num_dofs(), space.num_dofs(), t);
}

Vector assemble_load(const DGSpace& space, const ScalarFunction& f,
                     const AssemblyConfig& cfg) {
  const MeshLevel& level = space.level();
  const double h = level.cell_size();
  const QuadratureRule q = gauss_legendre(cfg.load_points);
  Vector load = Vector::Zero(space.num_dofs());
  for (int e = 0; e < level.num_elements(); ++e) {
    const Point o = level.element_origin(e);
    for (std::size_t i = 0; i < q.points.size(); ++i) {
      for (std::size_t j = 0; j < q.points.size(); ++j) {
        const double s = q.points[i];
        const double t = q.points[j];
        const double w = q.weights[i] * q.weights[j] * h * h;
        const double fv = f(o.x + s * h, o.y + t * h);
        for (int k = 0; k < 4; ++k) {
          load[DGSpace::dof(e, k)] += w * fv * q1_value(k, s, t);
        }
      }
    }
  }
  return load;
}

NormMatrices assemble_norm_matrices(const DGSpace& space,
                                    const CoefficientField& field,
                                    const AssemblyConfig& cfg) {
  check_resolution(space, field);
  const MeshLevel& level = space.level();
  const auto a = sample_diffusion(field, level);
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(16 * level.num_elements() +
                                     64 * level.num_edges()));
  add_volume_stiffness(t, level, a);
  add_edge_diffusion(t, level, a, cfg, false);
  NormMatrices out;
  out.diffusion = from_triplets(space.num_dofs(), space.num_dofs(), t);

  // sum over all edges of b_e ||[v]||^2, b_e = |b . nu_e| / 2.
  t.clear();
  const Vec2 b = field.convection;
  const QuadratureRule q = gauss_legendre(2);
  for (const Edge& e : level.edges()) {
    const double be = 0.5 * std::abs(b[0] * e.normal.x + b[1] * e.normal.y);
    if (be == 0.0) continue;
    double local[kMaxSide][kMaxSide] = {};
    int count = 0;
    int dofs[kMaxSide] = {};
    for (std::size_t qi = 0; qi < q.points.size(); ++qi) {
      const EdgeTrace tr = trace_at(level, e, q.points[qi]);
      const double w = q.weights[qi] * e.length;
      count = tr.count;
      for (int k = 0; k < tr.count; ++k) dofs[k] = tr.dof[k];
      for (int r = 0; r < tr.count; ++r) {
        for (int c = 0; c < tr.count; ++c) {
          local[r][c] += w * be * jump_weight(tr, c) * jump_weight(tr, r);
        }
      }
    }
    for (int r = 0; r < count; ++r) {
      for (int c = 0; c < count; ++c) {
        t.emplace_back(dofs[r], dofs[c], local[r][c]);
      }
    }
  }
  out.convection = from_triplets(space.num_dofs(), space.num_dofs(), t);
  return out;
}

double seminorm(const Vector& v, const SparseOperator& m) {
  if (m.rows() != v.size() || m.cols() != v.size()) {
    throw Error("seminorm: vector length " + std::to_string(v.size()) +
                " does not match a " + std::to_string(m.rows()) + "x" +
                std::to_string(m.cols()) + " matrix");
  }
  return std::sqrt(std::max(0.0, v.dot(m * v)));
}

double energy_norm(const Vector& v, const SparseOperator& diffusion_part,
                   const SparseOperator& convection_part) {
  const double d = seminorm(v, diffusion_part);
  const double c = seminorm(v, convection_part);
  return std::sqrt(d * d + c * c);
}

double energy_norm(const Vector& v, const NormMatrices& norms) {
  return energy_norm(v, norms.diffusion, norms.convection);
}

Vector solve_reference(const SparseOperator& system, const Vector& load) {
  if (system.rows() != load.size()) {
    throw Error("solve_reference: load has length " +
                std::to_string(load.size()) + ", system has " +
                std::to_string(system.rows()) + " rows");
  }
  try {
    return Factorization(system).solve(load);
  } catch (const Error& e) {
    throw Error(std::string("reference solve: ") + e.what());
  }
}

Vector solve_reference(const DGSpace& space, const CoefficientField& field,
                       const AssemblyConfig& cfg, const ScalarFunction& f) {
  const SparseOperator system =
      assemble_diffusion(space, field, cfg) + assemble_convection(space, field);
  return solve_reference(system, assemble_load(space, f, cfg));
}

std::vector<double> cell_averages(const DGSpace& space, const Vector& v) {
  if (v.size() != space.num_dofs()) {
    throw Error("cell_averages: vector length does not match the space");
  }
  std::vector<double> out(static_cast<std::size_t>(space.level().num_elements()));
  for (int e = 0; e < space.level().num_elements(); ++e) {
    double s = 0.0;
    for (int k = 0; k < 4; ++k) s += v[DGSpace::dof(e, k)];
    out[static_cast<std::size_t>(e)] = 0.25 * s;
  }
  return out;
}

}  // namespace dglod
