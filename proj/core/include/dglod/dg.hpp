#pragma once

#include <functional>
#include <iosfwd>
#include <string>

#include "dglod/coeff.hpp"
#include "dglod/mesh.hpp"
#include "dglod/solver.hpp"

namespace dglod {

// Fully discontinuous bilinear (Q1) space on a MeshLevel. Each element
// carries four nodal dofs at its corners, ordered SW, SE, NW, NE.
class DGSpace {
 public:
  explicit DGSpace(const MeshLevel& level) : level_(&level) {}

  const MeshLevel& level() const { return *level_; }
  int num_dofs() const { return kCornersPerCell * level_->num_elements(); }
  static int dof(int element, int corner) {
    return kCornersPerCell * element + corner;
  }

 private:
  const MeshLevel* level_;
};

// Reference bilinear basis on [0,1]^2.
double q1_value(int corner, double s, double t);
// Gradient with respect to the reference coordinates (s, t).
std::array<double, 2> q1_gradient(int corner, double s, double t);

// Evaluates a DG field at a point of element `element`.
double evaluate(const DGSpace& space, const Vector& v, int element, Point p);

struct AssemblyConfig {
  // Penalty sigma_e = sigma_scale * max(A-, A+).
  double sigma_scale = 10.0;
  // Gauss points per direction for the load vector.
  int load_points = 4;
};

using ScalarFunction = std::function<double(double, double)>;

// All operators follow M(i, j) = a(basis_j, basis_i): rows index test
// functions, columns trial functions.
SparseOperator assemble_diffusion(const DGSpace& space,
                                  const CoefficientField& field,
                                  const AssemblyConfig& cfg);
SparseOperator assemble_convection(const DGSpace& space,
                                   const CoefficientField& field);
SparseOperator assemble_mass(const DGSpace& space);
Vector assemble_load(const DGSpace& space, const ScalarFunction& f,
                     const AssemblyConfig& cfg);

// Matrices of the diffusion and convection parts of the squared energy
// norm.
struct NormMatrices {
  SparseOperator diffusion;
  SparseOperator convection;
};
NormMatrices assemble_norm_matrices(const DGSpace& space,
                                    const CoefficientField& field,
                                    const AssemblyConfig& cfg);

double energy_norm(const Vector& v, const SparseOperator& diffusion_part,
                   const SparseOperator& convection_part);
double energy_norm(const Vector& v, const NormMatrices& norms);
// sqrt(v^T M v) clamped at zero.
double seminorm(const Vector& v, const SparseOperator& m);

// Solves a_h(u, v) = F(v) on the whole fine space.
Vector solve_reference(const DGSpace& space, const CoefficientField& field,
                       const AssemblyConfig& cfg, const ScalarFunction& f);
Vector solve_reference(const SparseOperator& system, const Vector& load);

// Cell averages of a DG field (mean of the four corner values).
std::vector<double> cell_averages(const DGSpace& space, const Vector& v);

}  // namespace dglod
