#include "vsl/stability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vsl/parallel.hpp"

namespace vsl {

double relvar(std::span<const double> sample) {
  if (sample.size() < 2)
    throw std::invalid_argument("relvar: need at least 2 values");
  double sum = 0.0;
  for (double v : sample) {
    if (!std::isfinite(v) || v < 0.0)
      throw DataError("relvar: sample values must be finite and >= 0");
    sum += v;
  }
  const double n = static_cast<double>(sample.size());
  const double mean = sum / n;
  if (mean <= 0.0) throw DataError("relvar: zero mean");
  double sq = 0.0;
  for (double v : sample) {
    const double d = v - mean;
    sq += d * d;
  }
  const double var = sq / n;
  return var / (mean * mean);
}

double stability_ratio(std::span<const double> distances_for_one_query) {
  if (distances_for_one_query.empty())
    throw std::invalid_argument("stability_ratio: empty distance pool");
  double lo = distances_for_one_query[0], hi = distances_for_one_query[0];
  for (double v : distances_for_one_query) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (lo < 0.0) throw DataError("stability_ratio: negative distance");
  if (lo == 0.0)
    throw DataError("stability_ratio: DMIN = 0 (exact duplicate of the query; "
                    "exclude or perturb)");
  return hi / lo;
}

double strong_stability_constant(std::span<const DenseVector> queries,
                                 std::span<const DenseVector> docs,
                                 const Metric& metric) {
  if (queries.empty()) throw std::invalid_argument("strong_stability_constant: no queries");
  if (docs.empty()) throw std::invalid_argument("strong_stability_constant: no docs");
  double c = std::numeric_limits<double>::infinity();
  std::vector<double> pool(docs.size());
  for (const auto& q : queries) {
    for (std::size_t j = 0; j < docs.size(); ++j)
      pool[j] = metric_distance(metric, q, docs[j]);
    c = std::min(c, stability_ratio(pool));
  }
  return c;
}

StabilityReport make_stability_report(int dimension, std::string_view label,
                                      const std::vector<std::vector<double>>& per_query,
                                      int n_docs) {
  if (per_query.empty())
    throw std::invalid_argument("make_stability_report: no queries");
  StabilityReport report;
  report.dimension = dimension;
  report.config_label = std::string(label);
  report.n_queries = static_cast<int>(per_query.size());
  report.n_docs = n_docs;

  std::vector<double> pooled;
  std::size_t total = 0;
  for (const auto& row : per_query) total += row.size();
  pooled.reserve(total);
  for (const auto& row : per_query) {
    if (row.empty()) continue;  // hard-filter exclusions can drain a row
    report.per_query_ratio.push_back(stability_ratio(row));
    pooled.insert(pooled.end(), row.begin(), row.end());
  }
  if (pooled.empty())
    throw DataError("make_stability_report: every query pool is empty");
  report.relvar = relvar(pooled);
  return report;
}

std::vector<StabilityReport> stability_sweep(const DatasetGenerator& generator,
                                             std::span<const int> dims,
                                             const PairDistance& distance,
                                             std::string_view label, int threads) {
  if (dims.empty()) throw std::invalid_argument("stability_sweep: empty dims");
  for (std::size_t i = 1; i < dims.size(); ++i)
    if (dims[i] <= dims[i - 1])
      throw std::invalid_argument("stability_sweep: dims must be strictly increasing");

  std::vector<StabilityReport> reports;
  reports.reserve(dims.size());
  for (int dim : dims) {
    const SweepDataset data = generator(dim);
    if (data.queries.empty() || data.docs.empty())
      throw DataError("stability_sweep: generator produced an empty dataset");
    std::vector<std::vector<double>> per_query(data.queries.size());
    parallel_for(static_cast<std::int64_t>(data.queries.size()), threads,
                 [&](std::int64_t i) {
                   auto& row = per_query[static_cast<std::size_t>(i)];
                   row.resize(data.docs.size());
                   for (std::size_t j = 0; j < data.docs.size(); ++j)
                     row[j] = distance(data.queries[static_cast<std::size_t>(i)],
                                       data.docs[j]);
                 });
    reports.push_back(make_stability_report(dim, label, per_query,
                                            static_cast<int>(data.docs.size())));
  }
  return reports;
}

Verdict stability_verdict(std::span<const StabilityReport> reports,
                          double relvar_floor) {
  if (reports.size() < 2)
    throw std::invalid_argument("stability_verdict: need reports for >= 2 dimensions");
  bool monotone = true;
  for (std::size_t i = 1; i < reports.size(); ++i)
    if (reports[i].relvar > reports[i - 1].relvar * 1.10) monotone = false;
  const bool vanished = reports.back().relvar < relvar_floor;
  return (vanished && monotone) ? Verdict::unstable_evidence : Verdict::stable_evidence;
}

double quantile(std::span<const double> sample, double q) {
  if (sample.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("quantile: q outside [0,1]");
  std::vector<double> sorted(sample.begin(), sample.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  if (lo + 1 >= sorted.size()) return sorted.back();
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace vsl
