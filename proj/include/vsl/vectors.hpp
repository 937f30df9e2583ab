#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "vsl/errors.hpp"

namespace vsl {

using DenseVector = Eigen::VectorXd;

// Datasets are matrices with one point per row; row-major so a row is a
// contiguous read in the hot search loops.
using PointMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Sparse point over [0, dim): strictly increasing indices, positive finite
// values, nnz <= dim.
struct SparseVector {
  int dim = 0;
  std::vector<int> indices;
  std::vector<double> values;

  int nnz() const { return static_cast<int>(indices.size()); }
};

// Throws DataError if the SparseVector invariants are violated.
void check_sparse(const SparseVector& v);

struct Metric {
  enum class Kind { lp, cosine };
  Kind kind = Kind::lp;
  double p = 2.0;

  static Metric lp(double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("Metric: p must be >= 1");
    return Metric{Kind::lp, p};
  }
  static Metric cosine() { return Metric{Kind::cosine, 0.0}; }
};

namespace detail {

inline void require_finite(double r, const char* what) {
  if (!std::isfinite(r))
    throw std::invalid_argument(std::string(what) + ": non-finite result (bad input?)");
}

inline void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b)
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(a) + " vs " + std::to_string(b) + ")");
}

// Single out-of-line kernels shared by every caller, so distances computed
// through different expression types are bitwise identical.
double lp_distance_raw(const double* x, const double* y, Eigen::Index n, double p);
double lp_norm_raw(const double* x, Eigen::Index n, double p);
struct DotNorms {
  double dot, x_sq, y_sq;
};
DotNorms dot_norms_raw(const double* x, const double* y, Eigen::Index n);

// Contiguous view of any vector expression; materializes into `storage` only
// when the expression has no unit-stride data pointer.
template <typename Derived>
const double* contiguous_ptr(const Eigen::MatrixBase<Derived>& x,
                             Eigen::VectorXd& storage) {
  if constexpr (static_cast<bool>(Derived::Flags & Eigen::DirectAccessBit)) {
    if (x.derived().innerStride() == 1) return x.derived().data();
  }
  storage.resize(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) storage[i] = x.derived().coeff(i);
  return storage.data();
}

}  // namespace detail

// ||x - y||_p for p >= 1. Plain power sum, no compensated accumulation.
template <typename DA, typename DB>
double lp_distance(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y,
                   double p) {
  detail::require_same_size(x.size(), y.size(), "lp_distance");
  if (!(p >= 1.0)) throw std::invalid_argument("lp_distance: p must be >= 1");
  Eigen::VectorXd sx, sy;
  const double r = detail::lp_distance_raw(detail::contiguous_ptr(x, sx),
                                           detail::contiguous_ptr(y, sy), x.size(), p);
  detail::require_finite(r, "lp_distance");
  return r;
}

// 1 - <x,y>/(||x|| ||y||), in [0, 2]. Zero-norm inputs are rejected, never
// patched.
template <typename DA, typename DB>
double cosine_distance(const Eigen::MatrixBase<DA>& x, const Eigen::MatrixBase<DB>& y) {
  detail::require_same_size(x.size(), y.size(), "cosine_distance");
  Eigen::VectorXd sx, sy;
  const auto [dot, x_sq, y_sq] = detail::dot_norms_raw(
      detail::contiguous_ptr(x, sx), detail::contiguous_ptr(y, sy), x.size());
  detail::require_finite(dot, "cosine_distance");
  if (x_sq == 0.0 || y_sq == 0.0)
    throw std::invalid_argument("cosine_distance: zero-norm input");
  const double c =
      std::clamp(dot / (std::sqrt(x_sq) * std::sqrt(y_sq)), -1.0, 1.0);
  return 1.0 - c;
}

template <typename DA, typename DB>
double metric_distance(const Metric& metric, const Eigen::MatrixBase<DA>& x,
                       const Eigen::MatrixBase<DB>& y) {
  return metric.kind == Metric::Kind::cosine ? cosine_distance(x, y)
                                             : lp_distance(x, y, metric.p);
}

template <typename DA>
double lp_norm(const Eigen::MatrixBase<DA>& x, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
  Eigen::VectorXd sx;
  return detail::lp_norm_raw(detail::contiguous_ptr(x, sx), x.size(), p);
}

// Rescales x to unit lp norm. Zero vectors are an error.
DenseVector normalize(const DenseVector& x, double p);

// The signed-to-nonnegative split (x+, x-) in R^{2m}: x_i+ = max(x_i, 0),
// x_i- = max(-x_i, 0). Preserves lp norms and is bi-Lipschitz:
//   2^{-(1-1/p)} ||x-y||_p <= ||phi(x)-phi(y)||_p <= 2^{1/p} ||x-y||_p.
DenseVector split_signed(const DenseVector& x);

// ||x - y||_p over sparse points via a merge of the sorted index lists,
// O(nnz_x + nnz_y). Equals lp_distance on the densified vectors.
double sparse_lp_distance(const SparseVector& x, const SparseVector& y, double p);

double sparse_lp_norm(const SparseVector& x, double p);

DenseVector densify(const SparseVector& x);

PointMatrix to_matrix(std::span<const DenseVector> points);
std::vector<DenseVector> to_vectors(const PointMatrix& m);

}  // namespace vsl
