#pragma once

#include <Eigen/Dense>
#include <span>
#include <utility>
#include <vector>

#include "vsl/vectors.hpp"

namespace vsl {

// A finite, nonempty set of equal-dimension vectors (one multi-vector query
// or document).
using VectorSet = std::vector<DenseVector>;

struct MultiVectorProblem {
  std::vector<VectorSet> queries;    // all of equal cardinality k
  std::vector<VectorSet> documents;
  Metric metric = Metric::cosine();
};

// Throws std::invalid_argument on empty sets, ragged dimensions, or unequal
// query cardinalities.
void check_problem(const MultiVectorProblem& problem);

enum class Aggregation { chamfer, avg_pool };

// Per-element nearest distances min_{b in B} delta(a, b), one per a in A.
std::vector<double> chamfer_terms(const VectorSet& a, const VectorSet& b,
                                  const Metric& metric);

// Chamfer(A, B) = sum_{a in A} min_{b in B} delta(a, b). Not symmetric.
double chamfer(const VectorSet& a, const VectorSet& b, const Metric& metric);

// Mean of all |A| x |B| pairwise distances. Symmetric.
double avg_pool(const VectorSet& a, const VectorSet& b, const Metric& metric);

double aggregate(Aggregation agg, const VectorSet& a, const VectorSet& b,
                 const Metric& metric);

// The single-vector instance over the unions of all query-set and
// document-set vectors. Deduplication is exact bitwise equality; first
// occurrence order is kept.
std::pair<std::vector<DenseVector>, std::vector<DenseVector>> induced_instance(
    const MultiVectorProblem& problem);

// Row i, column j = Agg(Q_i, D_j). Rows feed the stability estimators
// unchanged. Parallel across rows; output independent of thread count.
Eigen::MatrixXd agg_distance_matrix(const MultiVectorProblem& problem,
                                    Aggregation agg, int threads = 1);

}  // namespace vsl
