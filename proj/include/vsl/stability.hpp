#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vsl/vectors.hpp"

namespace vsl {

// One (dimension, configuration) cell of a stability experiment.
struct StabilityReport {
  int dimension = 0;
  std::vector<double> per_query_ratio;  // DMAX/DMIN, one per surviving query
  double relvar = 0.0;                  // pooled over all (q, d) distances
  int n_queries = 0;
  int n_docs = 0;
  std::string config_label;
};

// Var[x] / E[x]^2 with population (divide-by-N) variance, so a constant
// sample gives exactly 0. Needs >= 2 finite nonnegative values and a
// positive mean.
double relvar(std::span<const double> sample);

// max/min of one query's distance pool, >= 1. A zero minimum means the
// database contains the query itself; the caller must exclude or perturb,
// so it raises DataError instead of returning infinity.
double stability_ratio(std::span<const double> distances_for_one_query);

// Smallest per-query DMAX/DMIN over the database: the empirical strong
// stability constant.
double strong_stability_constant(std::span<const DenseVector> queries,
                                 std::span<const DenseVector> docs,
                                 const Metric& metric);

// Builds a report from per-query distance pools. Rows emptied by hard
// filtering are dropped from the ratio statistics; pooled relvar uses every
// surviving value.
StabilityReport make_stability_report(int dimension, std::string_view label,
                                      const std::vector<std::vector<double>>& per_query,
                                      int n_docs);

struct SweepDataset {
  std::vector<DenseVector> queries;
  std::vector<DenseVector> docs;
};

// Dataset spec for a sweep: deterministic per dimension given the seed the
// callable captured.
using DatasetGenerator = std::function<SweepDataset(int dim)>;
using PairDistance = std::function<double(const DenseVector&, const DenseVector&)>;

std::vector<StabilityReport> stability_sweep(const DatasetGenerator& generator,
                                             std::span<const int> dims,
                                             const PairDistance& distance,
                                             std::string_view label,
                                             int threads = 1);

enum class Verdict { stable_evidence, unstable_evidence };

// Finite-sample evidence, not a proof: unstable iff relvar at the largest
// dimension fell below the floor and the sweep decreased monotonically up to
// 10% per-step noise. Defaults are artifact conventions.
Verdict stability_verdict(std::span<const StabilityReport> reports,
                          double relvar_floor = 0.01);

// Type-7 (linear interpolation) quantile of an unsorted sample.
double quantile(std::span<const double> sample, double q);

}  // namespace vsl
