#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace dglod {

using Vector = Eigen::VectorXd;
using DenseMatrix = Eigen::MatrixXd;
// Compressed column storage; setFromTriplets sums duplicates in input
// order, so assembly from an ordered triplet list is reproducible.
using SparseOperator = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;
using Triplet = Eigen::Triplet<double, int>;

SparseOperator from_triplets(int rows, int cols,
                             const std::vector<Triplet>& triplets);

// Largest absolute entry (0 for an empty matrix).
double max_abs(const SparseOperator& a);

// Sparse LU of a square, possibly nonsymmetric matrix. Immutable once
// built; solve() may be called concurrently.
class Factorization {
 public:
  explicit Factorization(const SparseOperator& a);
  ~Factorization();
  Factorization(Factorization&&) noexcept;
  Factorization& operator=(Factorization&&) noexcept;

  int size() const { return size_; }
  Vector solve(const Vector& rhs) const;
  DenseMatrix solve(const DenseMatrix& rhs) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int size_ = 0;
};

Factorization factorize(const SparseOperator& a);

// A x + C^T mu = rhs, C x = 0.
struct SaddleSystem {
  SparseOperator a;
  SparseOperator c;
  Vector rhs;
};

struct SaddleSolution {
  Vector x;
  Vector multipliers;
};

// Factorization of the block matrix [[A, C^T], [C, 0]], reusable for many
// right-hand sides.
class SaddleFactorization {
 public:
  // Checks that C has full row rank and throws naming the dependent rows
  // otherwise. The check can be skipped when rank is known structurally.
  SaddleFactorization(const SparseOperator& a, const SparseOperator& c,
                      bool check_rank = true);

  int primal_size() const { return n_; }
  int constraint_count() const { return m_; }
  SaddleSolution solve(const Vector& rhs) const;
  // Solves for several right-hand sides stored as columns; returns only x.
  DenseMatrix solve_primal(const DenseMatrix& rhs) const;

 private:
  int n_;
  int m_;
  Factorization lu_;
};

SaddleSolution solve_saddle(const SaddleSystem& sys);

// Row indices of C that are linearly dependent on the others (empty when
// C has full row rank).
std::vector<int> dependent_rows(const SparseOperator& c);

}  // namespace dglod
