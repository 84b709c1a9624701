#include "dglod/solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include <Eigen/OrderingMethods>
#include <Eigen/SparseLU>
#include <Eigen/SparseQR>
#ifdef DGLOD_USE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "dglod/error.hpp"

namespace dglod {

SparseOperator from_triplets(int rows, int cols,
                             const std::vector<Triplet>& triplets) {
  SparseOperator m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

double max_abs(const SparseOperator& a) {
  double m = 0.0;
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(a, k); it; ++it) {
      m = std::max(m, std::abs(it.value()));
    }
  }
  return m;
}

namespace {

template <typename Lu>
std::string error_message(Lu& lu) {
  if constexpr (requires { lu.lastErrorMessage(); }) {
    return lu.lastErrorMessage();
  } else {
    return "numerical or structural singularity";
  }
}

}  // namespace

struct Factorization::Impl {
  // UMFPACK reads the matrix arrays again during solves.
  SparseOperator matrix;
#ifdef DGLOD_USE_UMFPACK
  Eigen::UmfPackLU<SparseOperator> lu;
#else
  Eigen::SparseLU<SparseOperator, Eigen::COLAMDOrdering<int>> lu;
#endif
};

Factorization::Factorization(const SparseOperator& a)
    : impl_(std::make_unique<Impl>()), size_(static_cast<int>(a.rows())) {
  if (a.rows() != a.cols()) {
    throw Error("factorize: matrix is " + std::to_string(a.rows()) + "x" +
                std::to_string(a.cols()) + ", expected square");
  }
  if (size_ == 0) return;
  impl_->matrix = a;
  impl_->matrix.makeCompressed();
#ifdef DGLOD_USE_UMFPACK
  // DG and saddle matrices have a symmetric nonzero pattern.
  impl_->lu.umfpackControl()(UMFPACK_STRATEGY) = UMFPACK_STRATEGY_SYMMETRIC;
#endif
  impl_->lu.analyzePattern(impl_->matrix);
  impl_->lu.factorize(impl_->matrix);
  if (impl_->lu.info() != Eigen::Success) {
    throw Error("factorize: singular matrix of size " +
                std::to_string(size_) + ": " + error_message(impl_->lu));
  }
}

Factorization::~Factorization() = default;
Factorization::Factorization(Factorization&&) noexcept = default;
Factorization& Factorization::operator=(Factorization&&) noexcept = default;

Vector Factorization::solve(const Vector& rhs) const {
  if (rhs.size() != size_) {
    throw Error("solve: right-hand side has length " +
                std::to_string(rhs.size()) + ", expected " +
                std::to_string(size_));
  }
  if (size_ == 0) return Vector();
  return impl_->lu.solve(rhs);
}

DenseMatrix Factorization::solve(const DenseMatrix& rhs) const {
  if (rhs.rows() != size_) {
    throw Error("solve: right-hand side has " + std::to_string(rhs.rows()) +
                " rows, expected " + std::to_string(size_));
  }
  if (size_ == 0) return DenseMatrix(0, rhs.cols());
  return impl_->lu.solve(rhs);
}

Factorization factorize(const SparseOperator& a) { return Factorization(a); }

std::vector<int> dependent_rows(const SparseOperator& c) {
  if (c.rows() == 0) return {};
  // Column-pivoted QR of C^T: pivots past the numerical rank are the
  // constraint rows spanned by the others.
  SparseOperator ct = c.transpose();
  ct.makeCompressed();
  Eigen::SparseQR<SparseOperator, Eigen::COLAMDOrdering<int>> qr;
  qr.compute(ct);
  if (qr.info() != Eigen::Success) {
    throw Error("saddle: QR of constraint matrix failed");
  }
  const auto rank = static_cast<int>(qr.rank());
  std::vector<int> out;
  const auto& perm = qr.colsPermutation().indices();
  for (int k = rank; k < static_cast<int>(c.rows()); ++k) {
    out.push_back(perm[k]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

SparseOperator saddle_matrix(const SparseOperator& a, const SparseOperator& c) {
  const auto n = static_cast<int>(a.rows());
  const auto m = static_cast<int>(c.rows());
  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(a.nonZeros() + 2 * c.nonZeros()));
  for (int k = 0; k < a.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(a, k); it; ++it) {
      t.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()),
                     it.value());
    }
  }
  for (int k = 0; k < c.outerSize(); ++k) {
    for (SparseOperator::InnerIterator it(c, k); it; ++it) {
      const auto r = static_cast<int>(it.row());
      const auto col = static_cast<int>(it.col());
      t.emplace_back(n + r, col, it.value());
      t.emplace_back(col, n + r, it.value());
    }
  }
  return from_triplets(n + m, n + m, t);
}

}  // namespace

SaddleFactorization::SaddleFactorization(const SparseOperator& a,
                                         const SparseOperator& c,
                                         bool check_rank)
    : n_(static_cast<int>(a.rows())),
      m_(static_cast<int>(c.rows())),
      lu_([&] {
        if (a.rows() != a.cols()) {
          throw Error("saddle: A must be square");
        }
        if (c.rows() > 0 && c.cols() != a.cols()) {
          throw Error("saddle: constraint matrix has " +
                      std::to_string(c.cols()) + " columns, expected " +
                      std::to_string(a.cols()));
        }
        if (c.rows() > a.rows()) {
          throw Error("saddle: more constraints than unknowns");
        }
        if (check_rank) {
          const auto dep = dependent_rows(c);
          if (!dep.empty()) {
            std::ostringstream msg;
            msg << "saddle: constraint matrix is rank deficient; dependent "
                   "rows:";
            for (int r : dep) msg << ' ' << r;
            throw Error(msg.str());
          }
        }
        return c.rows() == 0 ? Factorization(a)
                             : Factorization(saddle_matrix(a, c));
      }()) {}

SaddleSolution SaddleFactorization::solve(const Vector& rhs) const {
  if (rhs.size() != n_) {
    throw Error("saddle: right-hand side has length " +
                std::to_string(rhs.size()) + ", expected " +
                std::to_string(n_));
  }
  Vector full = Vector::Zero(n_ + m_);
  full.head(n_) = rhs;
  const Vector sol = lu_.solve(full);
  return {sol.head(n_), sol.tail(m_)};
}

DenseMatrix SaddleFactorization::solve_primal(const DenseMatrix& rhs) const {
  if (rhs.rows() != n_) {
    throw Error("saddle: right-hand side has " + std::to_string(rhs.rows()) +
                " rows, expected " + std::to_string(n_));
  }
  DenseMatrix full = DenseMatrix::Zero(n_ + m_, rhs.cols());
  full.topRows(n_) = rhs;
  return lu_.solve(full).topRows(n_);
}

SaddleSolution solve_saddle(const SaddleSystem& sys) {
  return SaddleFactorization(sys.a, sys.c).solve(sys.rhs);
}

}  // namespace dglod
