#include "dglod/lod.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "dglod/error.hpp"
#include "dglod/parallel.hpp"

namespace dglod {

Vector CoarseProjection::project(const Vector& fine) const {
  if (fine.size() != fine_dofs()) {
    throw Error("projection: vector length " + std::to_string(fine.size()) +
                " does not match " + std::to_string(fine_dofs()) +
                " fine dofs");
  }
  return coarse_mass_inverse * (constraint * fine);
}

Vector CoarseProjection::project_to_fine(const Vector& fine) const {
  return injection * project(fine);
}

CoarseProjection build_projection(const MeshHierarchy& hier) {
  const MeshLevel& coarse = hier.coarse();
  const MeshLevel& fine = hier.fine();
  const int ratio = hier.refinement_ratio();
  const DGSpace fine_space(fine);
  const DGSpace coarse_space(coarse);

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(16 * fine.num_elements()));
  for (int e = 0; e < fine.num_elements(); ++e) {
    const int parent = hier.parent(e);
    const auto [fx, fy] = fine.element_coords(e);
    const auto [cx, cy] = coarse.element_coords(parent);
    for (int k = 0; k < kCornersPerCell; ++k) {
      // Fine corner in the reference coordinates of the parent.
      const double s =
          static_cast<double>(fx - cx * ratio + (k & 1 ? 1 : 0)) / ratio;
      const double tt =
          static_cast<double>(fy - cy * ratio + (k & 2 ? 1 : 0)) / ratio;
      for (int j = 0; j < kCornersPerCell; ++j) {
        const double v = q1_value(j, s, tt);
        if (v != 0.0) {
          t.emplace_back(DGSpace::dof(e, k), coarse_index(parent, j), v);
        }
      }
    }
  }
  CoarseProjection p;
  p.injection = from_triplets(fine_space.num_dofs(), coarse_space.num_dofs(), t);

  const SparseOperator mass = assemble_mass(fine_space);
  p.constraint = SparseOperator((mass * p.injection).transpose());
  p.constraint.makeCompressed();

  // Coarse mass blocks are identical; invert the reference block once.
  const SparseOperator coarse_mass = assemble_mass(coarse_space);
  Eigen::Matrix4d block;
  for (int r = 0; r < 4; ++r) {
    for (int c = 0; c < 4; ++c) block(r, c) = coarse_mass.coeff(r, c);
  }
  const Eigen::Matrix4d inv = block.inverse();
  t.clear();
  for (int e = 0; e < coarse.num_elements(); ++e) {
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) {
        t.emplace_back(coarse_index(e, r), coarse_index(e, c), inv(r, c));
      }
    }
  }
  p.coarse_mass_inverse =
      from_triplets(coarse_space.num_dofs(), coarse_space.num_dofs(), t);
  return p;
}

FineProblem assemble_fine_problem(const MeshHierarchy& hier,
                                  const CoefficientField& field,
                                  const AssemblyConfig& cfg,
                                  const ScalarFunction& f) {
  const DGSpace space(hier.fine());
  FineProblem p;
  p.diffusion = assemble_diffusion(space, field, cfg);
  p.convection = assemble_convection(space, field);
  p.system = p.diffusion + p.convection;
  p.system.makeCompressed();
  p.norms = assemble_norm_matrices(space, field, cfg);
  p.load = assemble_load(space, f, cfg);
  return p;
}

Vector CorrectorBasis::corrector(int element, int corner) const {
  return correctors.col(coarse_index(element, corner));
}

Vector CorrectorBasis::corrected_function(int element, int corner) const {
  return corrected.col(coarse_index(element, corner));
}

namespace {

const SparseOperator& corrector_operator(const FineProblem& problem,
                                         CorrectorMode mode) {
  return mode == CorrectorMode::kConvective ? problem.system
                                            : problem.diffusion;
}

// Rows/columns of `m` restricted to the listed indices. `row_map` maps a
// global row to its local index or -1.
SparseOperator extract(const SparseOperator& m, std::span<const int> row_map,
                       int local_rows, std::span<const int> cols) {
  std::vector<Triplet> t;
  for (std::size_t lc = 0; lc < cols.size(); ++lc) {
    for (SparseOperator::InnerIterator it(m, cols[lc]); it; ++it) {
      const int lr = row_map[static_cast<std::size_t>(it.row())];
      if (lr >= 0) t.emplace_back(lr, static_cast<int>(lc), it.value());
    }
  }
  return from_triplets(local_rows, static_cast<int>(cols.size()), t);
}

std::string corrector_label(int element, int corner) {
  return "(T=" + std::to_string(element) + ", j=" + std::to_string(corner) +
         ")";
}

// Local saddle problem for one patch box, shared by every coarse element
// whose patch is that box.
class PatchProblem {
 public:
  PatchProblem(const MeshHierarchy& hier, const SparseOperator& op,
               const CoarseProjection& proj, const CellBox& box)
      : dofs_() {
    const MeshLevel& coarse = hier.coarse();
    for (int e : hier.fine_elements_in(box)) {
      for (int k = 0; k < kCornersPerCell; ++k) {
        dofs_.push_back(DGSpace::dof(e, k));
      }
    }
    std::vector<int> fine_map(static_cast<std::size_t>(op.rows()), -1);
    for (std::size_t i = 0; i < dofs_.size(); ++i) {
      fine_map[static_cast<std::size_t>(dofs_[i])] = static_cast<int>(i);
    }
    std::vector<int> coarse_map(static_cast<std::size_t>(proj.coarse_dofs()),
                                -1);
    int rows = 0;
    for (int y = box.y0; y <= box.y1; ++y) {
      for (int x = box.x0; x <= box.x1; ++x) {
        const int te = coarse.element_index(x, y);
        for (int j = 0; j < kCornersPerCell; ++j) {
          coarse_map[static_cast<std::size_t>(coarse_index(te, j))] = rows++;
        }
      }
    }
    const SparseOperator a =
        extract(op, fine_map, static_cast<int>(dofs_.size()), dofs_);
    const SparseOperator c = extract(proj.constraint, coarse_map, rows, dofs_);
    // Constraint rows of distinct coarse cells have disjoint supports and
    // each 4-row block is a nonsingular mass block, so C has full rank.
    factorization_.emplace(a, c, false);
  }

  const std::vector<int>& dofs() const { return dofs_; }

  // Restricts global columns to the patch, solves, returns local solutions.
  DenseMatrix solve(const SparseOperator& global_rhs,
                    std::span<const int> columns) const {
    DenseMatrix rhs = DenseMatrix::Zero(static_cast<int>(dofs_.size()),
                                        static_cast<int>(columns.size()));
    for (std::size_t c = 0; c < columns.size(); ++c) {
      const Vector col = global_rhs.col(columns[c]);
      for (std::size_t i = 0; i < dofs_.size(); ++i) {
        rhs(static_cast<int>(i), static_cast<int>(c)) = col[dofs_[i]];
      }
    }
    return factorization_->solve_primal(rhs);
  }

 private:
  std::vector<int> dofs_;
  std::optional<SaddleFactorization> factorization_;
};

// Corrector columns keyed by coarse index, as (fine dof, value) lists.
using ColumnSlots = std::vector<std::vector<std::pair<int, double>>>;

SparseOperator columns_to_matrix(const ColumnSlots& slots, int rows) {
  std::vector<Triplet> t;
  std::size_t total = 0;
  for (const auto& s : slots) total += s.size();
  t.reserve(total);
  for (std::size_t c = 0; c < slots.size(); ++c) {
    for (const auto& [r, v] : slots[c]) {
      t.emplace_back(r, static_cast<int>(c), v);
    }
  }
  return from_triplets(rows, static_cast<int>(slots.size()), t);
}

// Ideal correctors: one global saddle factorization, solved in column
// blocks to bound memory.
void ideal_correctors(const SparseOperator& op, const SparseOperator& rhs_ops,
                      const CoarseProjection& proj,
                      std::span<const int> columns, ColumnSlots& slots) {
  const SaddleFactorization fact(op, proj.constraint, false);
  constexpr int kBlock = 64;
  const int n = static_cast<int>(op.rows());
  for (std::size_t start = 0; start < columns.size(); start += kBlock) {
    const std::size_t end = std::min(columns.size(), start + kBlock);
    DenseMatrix rhs = DenseMatrix::Zero(n, static_cast<int>(end - start));
    for (std::size_t c = start; c < end; ++c) {
      rhs.col(static_cast<int>(c - start)) = rhs_ops.col(columns[c]);
    }
    const DenseMatrix sol = fact.solve_primal(rhs);
    for (std::size_t c = start; c < end; ++c) {
      auto& slot = slots[static_cast<std::size_t>(columns[c])];
      slot.clear();
      slot.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) {
        slot.emplace_back(i, sol(i, static_cast<int>(c - start)));
      }
    }
  }
}

}  // namespace

CorrectorBasis compute_correctors(const MeshHierarchy& hier,
                                  const FineProblem& problem,
                                  const CoarseProjection& proj, Layers layers,
                                  CorrectorMode mode, int threads) {
  if (layers && *layers < 0) {
    throw Error("correctors: negative layer count");
  }
  const SparseOperator& op = corrector_operator(problem, mode);
  const SparseOperator rhs_ops = op * proj.injection;
  const int coarse_dofs = proj.coarse_dofs();
  const int fine_dofs = proj.fine_dofs();
  ColumnSlots slots(static_cast<std::size_t>(coarse_dofs));

  if (!layers) {
    std::vector<int> all(static_cast<std::size_t>(coarse_dofs));
    for (int i = 0; i < coarse_dofs; ++i) all[static_cast<std::size_t>(i)] = i;
    try {
      ideal_correctors(op, rhs_ops, proj, all, slots);
    } catch (const Error& e) {
      throw Error(std::string("ideal correctors: ") + e.what());
    }
  } else {
    std::map<CellBox, std::vector<int>> groups;
    for (int te = 0; te < hier.coarse().num_elements(); ++te) {
      groups[patch_box(hier.coarse(), te, *layers)].push_back(te);
    }
    std::vector<std::pair<CellBox, std::vector<int>>> tasks(groups.begin(),
                                                            groups.end());
    parallel_for(static_cast<int>(tasks.size()), threads, [&](int ti) {
      const auto& [box, elements] = tasks[static_cast<std::size_t>(ti)];
      std::vector<int> columns;
      for (int te : elements) {
        for (int j = 0; j < kCornersPerCell; ++j) {
          columns.push_back(coarse_index(te, j));
        }
      }
      try {
        const PatchProblem patch(hier, op, proj, box);
        const DenseMatrix sol = patch.solve(rhs_ops, columns);
        for (std::size_t c = 0; c < columns.size(); ++c) {
          auto& slot = slots[static_cast<std::size_t>(columns[c])];
          slot.reserve(patch.dofs().size());
          for (std::size_t i = 0; i < patch.dofs().size(); ++i) {
            slot.emplace_back(patch.dofs()[i],
                              sol(static_cast<int>(i), static_cast<int>(c)));
          }
        }
      } catch (const Error& e) {
        throw Error("corrector " + corrector_label(elements.front(), 0) +
                    " failed: " + e.what());
      }
    });
  }

  CorrectorBasis basis;
  basis.mode = mode;
  basis.layers = layers;
  basis.correctors = columns_to_matrix(slots, fine_dofs);
  basis.corrected = proj.injection - basis.correctors;
  basis.corrected.makeCompressed();
  return basis;
}

DenseMatrix compute_element_correctors(const MeshHierarchy& hier,
                                       const FineProblem& problem,
                                       const CoarseProjection& proj,
                                       std::span<const int> elements,
                                       Layers layers, CorrectorMode mode) {
  const SparseOperator& op = corrector_operator(problem, mode);
  const SparseOperator rhs_ops = op * proj.injection;
  const int fine_dofs = proj.fine_dofs();
  DenseMatrix out = DenseMatrix::Zero(fine_dofs,
                                      static_cast<int>(kCornersPerCell * elements.size()));
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const int te = elements[k];
    std::vector<int> columns;
    for (int j = 0; j < kCornersPerCell; ++j) {
      columns.push_back(coarse_index(te, j));
    }
    const auto first = static_cast<int>(kCornersPerCell * k);
    if (!layers) {
      ColumnSlots slots(static_cast<std::size_t>(proj.coarse_dofs()));
      ideal_correctors(op, rhs_ops, proj, columns, slots);
      for (int j = 0; j < kCornersPerCell; ++j) {
        for (const auto& [r, v] :
             slots[static_cast<std::size_t>(columns[static_cast<std::size_t>(j)])]) {
          out(r, first + j) = v;
        }
      }
    } else {
      const PatchProblem patch(hier, op, proj,
                               patch_box(hier.coarse(), te, *layers));
      const DenseMatrix sol = patch.solve(rhs_ops, columns);
      for (int j = 0; j < kCornersPerCell; ++j) {
        for (std::size_t i = 0; i < patch.dofs().size(); ++i) {
          out(patch.dofs()[i], first + j) = sol(static_cast<int>(i), j);
        }
      }
    }
  }
  return out;
}

MultiscaleSystem assemble_multiscale(const CorrectorBasis& basis,
                                     const SparseOperator& fine_system,
                                     const Vector& load) {
  const SparseOperator& psi = basis.corrected;
  if (fine_system.cols() != psi.rows() || load.size() != psi.rows()) {
    throw Error("multiscale assembly: fine operator, load and basis sizes "
                "disagree");
  }
  const SparseOperator applied = fine_system * psi;
  const SparseOperator psi_t = psi.transpose();
  MultiscaleSystem sys;
  sys.matrix = psi_t * applied;
  sys.matrix.makeCompressed();
  sys.rhs = psi_t * load;
  return sys;
}

MultiscaleSolution solve_multiscale(const MultiscaleSystem& system,
                                    const CorrectorBasis& basis) {
  MultiscaleSolution sol;
  try {
    sol.coarse_coefficients = Factorization(system.matrix).solve(system.rhs);
  } catch (const Error& e) {
    throw Error(std::string("multiscale solve: ") + e.what());
  }
  sol.fine = basis.corrected * sol.coarse_coefficients;
  return sol;
}

std::vector<DecayRow> corrector_decay_profile(const MeshHierarchy& hier,
                                              const FineProblem& problem,
                                              const CoarseProjection& proj,
                                              CorrectorMode mode, int element,
                                              std::span<const int> layers) {
  const int elems[] = {element};
  const DenseMatrix ideal =
      compute_element_correctors(hier, problem, proj, elems, std::nullopt, mode);
  std::vector<DecayRow> rows;
  for (int l : layers) {
    const DenseMatrix local =
        compute_element_correctors(hier, problem, proj, elems, l, mode);
    double worst = 0.0;
    for (int j = 0; j < kCornersPerCell; ++j) {
      const Vector diff = ideal.col(j) - local.col(j);
      worst = std::max(worst, energy_norm(diff, problem.norms));
    }
    rows.push_back({l, worst});
  }
  return rows;
}

std::optional<double> fit_decay_rate(std::span<const DecayRow> rows,
                                     double floor) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const DecayRow& r : rows) {
    if (!(r.distance > floor)) continue;
    const double x = r.layers;
    const double y = std::log(r.distance);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return std::nullopt;
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return std::exp((n * sxy - sx * sy) / denom);
}

double relative_energy_error(const Vector& reference, const Vector& approx,
                             const NormMatrices& norms) {
  if (reference.size() != approx.size()) {
    throw Error("relative error: vectors live in different spaces");
  }
  const double ref = energy_norm(reference, norms);
  if (ref == 0.0) {
    throw Error("relative error: reference solution has zero energy norm");
  }
  return energy_norm(reference - approx, norms) / ref;
}

ScaleSplit split_scales(const Vector& v, const CorrectorBasis& basis,
                        const CoarseProjection& proj) {
  ScaleSplit s;
  s.coarse = basis.corrected * proj.project(v);
  s.fine = v - s.coarse;
  return s;
}

double convection_size(const MeshHierarchy& hier,
                       const CoefficientField& field) {
  const Vec2 b = field.convection;
  return hier.coarse().cell_size() * std::hypot(b[0], b[1]) / field.alpha();
}

}  // namespace dglod
