#include "vsl/aggregation.hpp"

#include <cstring>
#include <limits>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "vsl/parallel.hpp"

namespace vsl {

namespace {

void check_set(const VectorSet& s, const char* what) {
  if (s.empty()) throw std::invalid_argument(std::string(what) + ": empty vector set");
  for (const auto& v : s)
    if (v.size() != s.front().size())
      throw std::invalid_argument(std::string(what) + ": ragged dimensions in set");
}

void check_pair(const VectorSet& a, const VectorSet& b, const char* what) {
  check_set(a, what);
  check_set(b, what);
  if (a.front().size() != b.front().size())
    throw std::invalid_argument(std::string(what) + ": dimension mismatch between sets");
}

}  // namespace

void check_problem(const MultiVectorProblem& problem) {
  if (problem.queries.empty() || problem.documents.empty())
    throw std::invalid_argument("MultiVectorProblem: needs queries and documents");
  const Eigen::Index dim = problem.queries.front().front().size();
  const std::size_t k = problem.queries.front().size();
  for (const auto& q : problem.queries) {
    check_set(q, "MultiVectorProblem.queries");
    if (q.size() != k)
      throw std::invalid_argument("MultiVectorProblem: query sets must share cardinality");
    if (q.front().size() != dim)
      throw std::invalid_argument("MultiVectorProblem: inconsistent dimension");
  }
  for (const auto& d : problem.documents) {
    check_set(d, "MultiVectorProblem.documents");
    if (d.front().size() != dim)
      throw std::invalid_argument("MultiVectorProblem: inconsistent dimension");
  }
}

std::vector<double> chamfer_terms(const VectorSet& a, const VectorSet& b,
                                  const Metric& metric) {
  check_pair(a, b, "chamfer");
  std::vector<double> terms;
  terms.reserve(a.size());
  for (const auto& qa : a) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& qb : b) best = std::min(best, metric_distance(metric, qa, qb));
    terms.push_back(best);
  }
  return terms;
}

double chamfer(const VectorSet& a, const VectorSet& b, const Metric& metric) {
  double sum = 0.0;
  for (double t : chamfer_terms(a, b, metric)) sum += t;
  return sum;
}

namespace {

// Canonical argument order for avg_pool: the accumulation order (and with it
// the floating-point sum) must not depend on which set came first.
bool canonical_before(const VectorSet& a, const VectorSet& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = 0; j < a[i].size(); ++j) {
      if (a[i][j] != b[i][j]) return a[i][j] < b[i][j];
    }
  }
  return true;
}

}  // namespace

double avg_pool(const VectorSet& a, const VectorSet& b, const Metric& metric) {
  check_pair(a, b, "avg_pool");
  const bool keep = canonical_before(a, b);
  const VectorSet& outer = keep ? a : b;
  const VectorSet& inner = keep ? b : a;
  double sum = 0.0;
  for (const auto& qa : outer)
    for (const auto& qb : inner) sum += metric_distance(metric, qa, qb);
  return sum / (static_cast<double>(a.size()) * static_cast<double>(b.size()));
}

double aggregate(Aggregation agg, const VectorSet& a, const VectorSet& b,
                 const Metric& metric) {
  return agg == Aggregation::chamfer ? chamfer(a, b, metric) : avg_pool(a, b, metric);
}

namespace {

// Bitwise dedup key: the raw coordinate bytes.
struct ByteView {
  std::string bytes;
  bool operator==(const ByteView& o) const { return bytes == o.bytes; }
};

struct ByteViewHash {
  std::size_t operator()(const ByteView& v) const {
    return std::hash<std::string>{}(v.bytes);
  }
};

std::vector<DenseVector> dedup_union(const std::vector<VectorSet>& sets) {
  std::vector<DenseVector> out;
  std::unordered_set<ByteView, ByteViewHash> seen;
  for (const auto& s : sets) {
    for (const auto& v : s) {
      ByteView key;
      key.bytes.assign(reinterpret_cast<const char*>(v.data()),
                       sizeof(double) * static_cast<std::size_t>(v.size()));
      if (seen.insert(std::move(key)).second) out.push_back(v);
    }
  }
  return out;
}

}  // namespace

std::pair<std::vector<DenseVector>, std::vector<DenseVector>> induced_instance(
    const MultiVectorProblem& problem) {
  check_problem(problem);
  return {dedup_union(problem.queries), dedup_union(problem.documents)};
}

Eigen::MatrixXd agg_distance_matrix(const MultiVectorProblem& problem,
                                    Aggregation agg, int threads) {
  check_problem(problem);
  const Eigen::Index rows = static_cast<Eigen::Index>(problem.queries.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(problem.documents.size());
  Eigen::MatrixXd out(rows, cols);
  parallel_for(rows, threads, [&](std::int64_t i) {
    for (Eigen::Index j = 0; j < cols; ++j)
      out(i, j) = aggregate(agg, problem.queries[static_cast<std::size_t>(i)],
                            problem.documents[static_cast<std::size_t>(j)],
                            problem.metric);
  });
  return out;
}

}  // namespace vsl
