#pragma once

// Brute-force reference computations used only by the tests. They share no
// assembly code with the library: forms are evaluated pointwise with their
// own element/edge enumeration, a hard-coded 5-point Gauss rule and finite
// difference gradients, and constrained problems are solved with dense
// null-space bases.

#include <vector>

#include <Eigen/Dense>

#include "dglod/coeff.hpp"
#include "dglod/mesh.hpp"
#include "dglod/solver.hpp"

namespace dglod::oracle {

struct FormParts {
  double volume = 0.0;
  double penalty = 0.0;
  double consistency = 0.0;
};

// a_h^d(u, v) split into its volume, penalty and consistency terms.
FormParts diffusion_form(const MeshLevel& level, const std::vector<double>& a,
                         double sigma_scale, const Vector& u, const Vector& v);

// a_h^c(u, v).
double convection_form(const MeshLevel& level, Vec2 b, const Vector& u,
                       const Vector& v);

// sum over interior edges b_e ||[v]||^2 + 1/2 sum over boundary edges
// |b . nu| ||v||^2.
double upwind_edge_sum(const MeshLevel& level, Vec2 b, const Vector& v);

// Squared diffusion and convection parts of the energy norm.
double energy_diffusion_sq(const MeshLevel& level, const std::vector<double>& a,
                           double sigma_scale, const Vector& v);
double energy_convection_sq(const MeshLevel& level, Vec2 b, const Vector& v);

// Orthonormal basis of ker C (columns).
DenseMatrix kernel_basis(const DenseMatrix& c);

// x in ker C with v^T A x = v^T rhs for all v in ker C.
Vector constrained_solve(const DenseMatrix& a, const DenseMatrix& c,
                         const Vector& rhs);

// Dense matrices with M(i, j) = form(basis_j, basis_i), built entry by entry
// from the pointwise forms above.
DenseMatrix form_matrix(const MeshLevel& level, const std::vector<double>& a,
                        double sigma_scale, Vec2 b);
DenseMatrix mass_matrix(const MeshLevel& level);

// Fine nodal values of every coarse Q1 basis function, column 4T + j.
DenseMatrix coarse_injection(const MeshLevel& coarse, const MeshLevel& fine);

// (f, basis_i) by the 5-point rule.
Vector load_vector(const MeshLevel& level, double (*f)(double, double));

// Point value of a DG field given by nodal values.
double point_value(const MeshLevel& level, const Vector& v, int element,
                   double x, double y);

}  // namespace dglod::oracle
