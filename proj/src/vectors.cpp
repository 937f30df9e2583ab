#include "vsl/vectors.hpp"

#include <algorithm>
#include <cmath>

namespace vsl {

namespace detail {

double lp_distance_raw(const double* x, const double* y, Eigen::Index n, double p) {
  double acc = 0.0;
  if (p == 2.0) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = x[i] - y[i];
      acc += d * d;
    }
    return std::sqrt(acc);
  }
  if (p == 1.0) {
    for (Eigen::Index i = 0; i < n; ++i) acc += std::abs(x[i] - y[i]);
    return acc;
  }
  for (Eigen::Index i = 0; i < n; ++i) acc += std::pow(std::abs(x[i] - y[i]), p);
  return std::pow(acc, 1.0 / p);
}

double lp_norm_raw(const double* x, Eigen::Index n, double p) {
  double acc = 0.0;
  if (p == 2.0) {
    for (Eigen::Index i = 0; i < n; ++i) acc += x[i] * x[i];
    return std::sqrt(acc);
  }
  if (p == 1.0) {
    for (Eigen::Index i = 0; i < n; ++i) acc += std::abs(x[i]);
    return acc;
  }
  for (Eigen::Index i = 0; i < n; ++i) acc += std::pow(std::abs(x[i]), p);
  return std::pow(acc, 1.0 / p);
}

DotNorms dot_norms_raw(const double* x, const double* y, Eigen::Index n) {
  DotNorms out{0.0, 0.0, 0.0};
  for (Eigen::Index i = 0; i < n; ++i) {
    out.dot += x[i] * y[i];
    out.x_sq += x[i] * x[i];
    out.y_sq += y[i] * y[i];
  }
  return out;
}

}  // namespace detail

void check_sparse(const SparseVector& v) {
  if (v.dim < 1) throw DataError("SparseVector: dim must be >= 1");
  if (v.indices.size() != v.values.size())
    throw DataError("SparseVector: indices/values length mismatch");
  if (v.indices.size() > static_cast<std::size_t>(v.dim))
    throw DataError("SparseVector: more entries than dimensions");
  int prev = -1;
  for (std::size_t i = 0; i < v.indices.size(); ++i) {
    const int idx = v.indices[i];
    if (idx <= prev) throw DataError("SparseVector: indices not strictly increasing");
    if (idx < 0 || idx >= v.dim) throw DataError("SparseVector: index out of range");
    const double val = v.values[i];
    if (!std::isfinite(val) || val <= 0.0)
      throw DataError("SparseVector: values must be finite and > 0");
    prev = idx;
  }
}

DenseVector normalize(const DenseVector& x, double p) {
  const double norm = lp_norm(x, p);
  if (norm == 0.0) throw std::invalid_argument("normalize: zero vector");
  return x / norm;
}

DenseVector split_signed(const DenseVector& x) {
  const Eigen::Index m = x.size();
  DenseVector out(2 * m);
  out.head(m) = x.cwiseMax(0.0);
  out.tail(m) = (-x).cwiseMax(0.0);
  return out;
}

double sparse_lp_distance(const SparseVector& x, const SparseVector& y, double p) {
  if (x.dim != y.dim)
    throw std::invalid_argument("sparse_lp_distance: dimension mismatch");
  if (!(p >= 1.0)) throw std::invalid_argument("sparse_lp_distance: p must be >= 1");
  double acc = 0.0;
  const auto term = [p](double d) {
    d = std::abs(d);
    if (p == 2.0) return d * d;
    if (p == 1.0) return d;
    return std::pow(d, p);
  };
  std::size_t i = 0, j = 0;
  while (i < x.indices.size() && j < y.indices.size()) {
    if (x.indices[i] == y.indices[j]) {
      acc += term(x.values[i] - y.values[j]);
      ++i, ++j;
    } else if (x.indices[i] < y.indices[j]) {
      acc += term(x.values[i]);
      ++i;
    } else {
      acc += term(y.values[j]);
      ++j;
    }
  }
  for (; i < x.indices.size(); ++i) acc += term(x.values[i]);
  for (; j < y.indices.size(); ++j) acc += term(y.values[j]);
  const double r = p == 1.0 ? acc : (p == 2.0 ? std::sqrt(acc) : std::pow(acc, 1.0 / p));
  detail::require_finite(r, "sparse_lp_distance");
  return r;
}

double sparse_lp_norm(const SparseVector& x, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("sparse_lp_norm: p must be >= 1");
  double acc = 0.0;
  for (double v : x.values) {
    const double a = std::abs(v);
    acc += p == 2.0 ? a * a : (p == 1.0 ? a : std::pow(a, p));
  }
  return p == 1.0 ? acc : (p == 2.0 ? std::sqrt(acc) : std::pow(acc, 1.0 / p));
}

DenseVector densify(const SparseVector& x) {
  DenseVector out = DenseVector::Zero(x.dim);
  for (std::size_t i = 0; i < x.indices.size(); ++i) out[x.indices[i]] = x.values[i];
  return out;
}

PointMatrix to_matrix(std::span<const DenseVector> points) {
  if (points.empty()) throw std::invalid_argument("to_matrix: empty point set");
  const Eigen::Index dim = points[0].size();
  PointMatrix m(static_cast<Eigen::Index>(points.size()), dim);
  for (std::size_t i = 0; i < points.size(); ++i) {
    detail::require_same_size(points[i].size(), dim, "to_matrix");
    m.row(static_cast<Eigen::Index>(i)) = points[i].transpose();
  }
  return m;
}

std::vector<DenseVector> to_vectors(const PointMatrix& m) {
  std::vector<DenseVector> out(static_cast<std::size_t>(m.rows()));
  for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m.row(i);
  return out;
}

}  // namespace vsl
