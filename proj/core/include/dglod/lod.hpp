#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dglod/coeff.hpp"
#include "dglod/dg.hpp"
#include "dglod/mesh.hpp"
#include "dglod/solver.hpp"

namespace dglod {

// Coarse index of basis function j on coarse element T.
inline int coarse_index(int element, int corner) {
  return kCornersPerCell * element + corner;
}

// L2 projection onto the coarse Q1 space and the constraint operator whose
// kernel is the fine-scale space.
struct CoarseProjection {
  // Column (T, j) holds the fine nodal values of lambda_{T,j}.
  SparseOperator injection;
  // Row (T, j) holds (lambda_{T,j}, basis_i) for every fine basis i.
  SparseOperator constraint;
  // Block-diagonal inverse of the coarse mass matrix.
  SparseOperator coarse_mass_inverse;

  // Coarse coefficients of the projection of a fine vector.
  Vector project(const Vector& fine) const;
  // Projection represented in the fine space.
  Vector project_to_fine(const Vector& fine) const;
  int coarse_dofs() const { return static_cast<int>(injection.cols()); }
  int fine_dofs() const { return static_cast<int>(injection.rows()); }
};

CoarseProjection build_projection(const MeshHierarchy& hier);

// Fine-level operators assembled once and shared by all corrector solves.
struct FineProblem {
  SparseOperator diffusion;   // SIPG part
  SparseOperator convection;  // upwind part
  SparseOperator system;      // diffusion + convection
  NormMatrices norms;
  Vector load;
};

FineProblem assemble_fine_problem(const MeshHierarchy& hier,
                                  const CoefficientField& field,
                                  const AssemblyConfig& cfg,
                                  const ScalarFunction& f);

enum class CorrectorMode { kConvective, kDiffusionOnly };

// Number of patch layers, or std::nullopt for the ideal (global) correctors.
using Layers = std::optional<int>;

struct CorrectorBasis {
  CorrectorMode mode = CorrectorMode::kConvective;
  Layers layers;
  // Column (T, j) is the corrector phi_{T,j}.
  SparseOperator correctors;
  // Column (T, j) is lambda_{T,j} - phi_{T,j}.
  SparseOperator corrected;

  int size() const { return static_cast<int>(correctors.cols()); }
  Vector corrector(int element, int corner) const;
  Vector corrected_function(int element, int corner) const;
};

// Solves, for every coarse basis function, the fine-scale problem on its
// patch: a(phi, v) = a(lambda, v) for all v in the fine-scale space with
// support in the patch. The bilinear form is a_h for kConvective and the
// diffusion part alone for kDiffusionOnly.
CorrectorBasis compute_correctors(const MeshHierarchy& hier,
                                  const FineProblem& problem,
                                  const CoarseProjection& proj, Layers layers,
                                  CorrectorMode mode, int threads = 1);

// Correctors of the listed coarse elements only (all four corners each),
// returned as columns ordered (elements[0], 0..3), (elements[1], 0..3), ...
DenseMatrix compute_element_correctors(const MeshHierarchy& hier,
                                       const FineProblem& problem,
                                       const CoarseProjection& proj,
                                       std::span<const int> elements,
                                       Layers layers, CorrectorMode mode);

struct MultiscaleSystem {
  SparseOperator matrix;
  Vector rhs;
};

MultiscaleSystem assemble_multiscale(const CorrectorBasis& basis,
                                     const SparseOperator& fine_system,
                                     const Vector& load);

struct MultiscaleSolution {
  Vector coarse_coefficients;
  Vector fine;
};

MultiscaleSolution solve_multiscale(const MultiscaleSystem& system,
                                    const CorrectorBasis& basis);

struct DecayRow {
  int layers = 0;
  double distance = 0.0;  // max over corners of |||phi - phi^L|||
};

std::vector<DecayRow> corrector_decay_profile(const MeshHierarchy& hier,
                                              const FineProblem& problem,
                                              const CoarseProjection& proj,
                                              CorrectorMode mode, int element,
                                              std::span<const int> layers);

// exp of the least-squares slope of log(distance) against layers, over
// rows with distance above `floor`. Empty when fewer than two rows qualify.
std::optional<double> fit_decay_rate(std::span<const DecayRow> rows,
                                     double floor = 1e-10);

double relative_energy_error(const Vector& reference, const Vector& approx,
                             const NormMatrices& norms);

// v = coarse + fine with fine in the kernel of the coarse projection; the
// coarse part is the image of the projection under (1 - F), exact when the
// basis is ideal.
struct ScaleSplit {
  Vector coarse;
  Vector fine;
};
ScaleSplit split_scales(const Vector& v, const CorrectorBasis& basis,
                        const CoarseProjection& proj);

// ||H b||_inf / alpha.
double convection_size(const MeshHierarchy& hier,
                       const CoefficientField& field);

}  // namespace dglod
