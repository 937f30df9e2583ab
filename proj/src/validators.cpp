#include "vsl/validators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "vsl/rng.hpp"
#include "vsl/stability.hpp"

namespace vsl {

double nondegeneracy_rate(std::span<const DenseVector> queries,
                          std::span<const VectorSet> doc_sets,
                          const Metric& metric, double c) {
  if (!(c > 1.0)) throw std::invalid_argument("nondegeneracy_rate: c must be > 1");
  if (queries.empty() || doc_sets.empty())
    throw std::invalid_argument("nondegeneracy_rate: empty input");
  std::size_t passed = 0;
  for (const auto& q : queries) {
    double max_of_min = 0.0;
    double max_of_max = 0.0;
    for (const auto& set : doc_sets) {
      if (set.empty()) throw std::invalid_argument("nondegeneracy_rate: empty document set");
      double lo = std::numeric_limits<double>::infinity();
      double hi = 0.0;
      for (const auto& d : set) {
        const double dist = metric_distance(metric, q, d);
        lo = std::min(lo, dist);
        hi = std::max(hi, dist);
      }
      max_of_min = std::max(max_of_min, lo);
      max_of_max = std::max(max_of_max, hi);
    }
    if (c * max_of_min >= max_of_max) ++passed;
  }
  return static_cast<double>(passed) / static_cast<double>(queries.size());
}

double covariance_sum(std::span<const VectorSet> query_sets,
                      std::span<const DenseVector> docs, const Metric& metric) {
  if (query_sets.size() < 2)
    throw std::invalid_argument("covariance_sum: need at least 2 query sets");
  if (docs.empty()) throw std::invalid_argument("covariance_sum: empty docs");
  const std::size_t k = query_sets.front().size();
  for (const auto& set : query_sets)
    if (set.size() != k)
      throw std::invalid_argument("covariance_sum: query sets must share cardinality");
  if (k < 2) return 0.0;  // no position pairs

  // a(s, i) = nearest-neighbor distance of position i in query set s.
  const std::size_t s_count = query_sets.size();
  std::vector<double> a(s_count * k);
  for (std::size_t s = 0; s < s_count; ++s) {
    for (std::size_t i = 0; i < k; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& d : docs)
        best = std::min(best, metric_distance(metric, query_sets[s][i], d));
      a[s * k + i] = best;
    }
  }
  std::vector<double> mean(k, 0.0);
  for (std::size_t s = 0; s < s_count; ++s)
    for (std::size_t i = 0; i < k; ++i) mean[i] += a[s * k + i];
  for (auto& m : mean) m /= static_cast<double>(s_count);

  double total = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i + 1; j < k; ++j) {
      double cov = 0.0;
      for (std::size_t s = 0; s < s_count; ++s)
        cov += (a[s * k + i] - mean[i]) * (a[s * k + j] - mean[j]);
      total += cov / static_cast<double>(s_count);  // population normalization
    }
  }
  return total;
}

MultiVectorValidation validate_multivector(const MultiVectorProblem& problem) {
  check_problem(problem);
  const auto [induced_queries, induced_docs] = induced_instance(problem);

  MultiVectorValidation out;
  out.c = strong_stability_constant(induced_queries, induced_docs, problem.metric);
  // A constant of at most 1 already sinks the strong-stability condition; the
  // non-degeneracy check is only meaningful (and only defined) for c > 1.
  out.nondegeneracy_pass_rate =
      out.c > 1.0 ? nondegeneracy_rate(induced_queries, problem.documents,
                                       problem.metric, out.c)
                  : 0.0;
  out.covariance_sum = covariance_sum(problem.queries, induced_docs, problem.metric);
  out.covariance_inconclusive = std::abs(out.covariance_sum) <= 1e-6;
  const bool cov_ok = out.covariance_sum >= 0.0 || out.covariance_inconclusive;
  out.all_pass = out.c > 1.0 && out.nondegeneracy_pass_rate == 1.0 && cov_ok;
  return out;
}

double filtered_threshold(double delta_max, double p_max) {
  if (!(delta_max > 0.0))
    throw std::invalid_argument("filtered_threshold: delta_max must be > 0");
  if (!(p_max > 0.0 && p_max < 1.0))
    throw std::invalid_argument("filtered_threshold: p_max must be in (0, 1)");
  return 2.0 * delta_max / (1.0 - p_max);
}

namespace {

// Magnitudes sorted descending with index-ascending tie break.
std::vector<std::size_t> rank_by_magnitude(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(values[a]) > std::abs(values[b]);
  });
  return order;
}

double pow_p(double v, double p) {
  v = std::abs(v);
  return p == 2.0 ? v * v : (p == 1.0 ? v : std::pow(v, p));
}

}  // namespace

double coi(const SparseVector& v, int kappa, double p) {
  if (kappa < 1) throw std::invalid_argument("coi: kappa must be >= 1");
  if (!(p >= 1.0)) throw std::invalid_argument("coi: p must be >= 1");
  double total = 0.0;
  for (double val : v.values) total += pow_p(val, p);
  if (total == 0.0) throw std::invalid_argument("coi: zero vector");
  const auto order = rank_by_magnitude(v.values);
  double head = 0.0;
  const std::size_t take = std::min<std::size_t>(kappa, order.size());
  for (std::size_t r = 0; r < take; ++r) head += pow_p(v.values[order[r]], p);
  return head / total;
}

double coi(const DenseVector& v, int kappa, double p) {
  SparseVector s;
  s.dim = static_cast<int>(v.size());
  for (int i = 0; i < s.dim; ++i) {
    if (v[i] != 0.0) {
      s.indices.push_back(i);
      s.values.push_back(std::abs(v[i]));
    }
  }
  if (s.indices.empty()) throw std::invalid_argument("coi: zero vector");
  return coi(s, kappa, p);
}

std::vector<int> top_k_indices(const SparseVector& v, int kappa) {
  if (kappa < 1) throw std::invalid_argument("top_k_indices: kappa must be >= 1");
  const auto order = rank_by_magnitude(v.values);
  const std::size_t take = std::min<std::size_t>(kappa, order.size());
  std::vector<int> out;
  out.reserve(take);
  for (std::size_t r = 0; r < take; ++r) out.push_back(v.indices[order[r]]);
  return out;
}

CoiSelection select_R(std::span<const SparseVector> docs, int kappa, double alpha,
                      double rho_target, double p, int R_max) {
  if (docs.empty()) throw std::invalid_argument("select_R: empty sample");
  if (kappa < 1) throw std::invalid_argument("select_R: kappa must be >= 1");
  if (R_max < 1) throw std::invalid_argument("select_R: R_max must be >= 1");
  if (!(p >= 1.0)) throw std::invalid_argument("select_R: p must be >= 1");

  // One sort per document gives C(R*kappa) for every R.
  std::vector<int> passes(static_cast<std::size_t>(R_max), 0);
  for (const auto& d : docs) {
    double total = 0.0;
    for (double val : d.values) total += pow_p(val, p);
    std::vector<double> mass(d.values.size());
    const auto order = rank_by_magnitude(d.values);
    for (std::size_t r = 0; r < order.size(); ++r)
      mass[r] = pow_p(d.values[order[r]], p);
    double prefix = 0.0;
    std::size_t taken = 0;
    for (int R = 1; R <= R_max; ++R) {
      const std::size_t head = std::min<std::size_t>(
          static_cast<std::size_t>(R) * static_cast<std::size_t>(kappa), mass.size());
      for (; taken < head; ++taken) prefix += mass[taken];
      if (total > 0.0 && prefix / total >= alpha) ++passes[static_cast<std::size_t>(R - 1)];
    }
  }
  const double n = static_cast<double>(docs.size());
  for (int R = 1; R <= R_max; ++R) {
    const double rho = passes[static_cast<std::size_t>(R - 1)] / n;
    if (rho >= rho_target) return CoiSelection{R, rho, true};
  }
  return CoiSelection{R_max, passes[static_cast<std::size_t>(R_max - 1)] / n, false};
}

double overlap_stat(const SparseVector& q, const SparseVector& d, int kappa,
                    double p) {
  if (q.dim != d.dim) throw std::invalid_argument("overlap_stat: dimension mismatch");
  const double nq = sparse_lp_norm(q, p);
  const double nd = sparse_lp_norm(d, p);
  if (std::abs(nq - 1.0) > 1e-6 || std::abs(nd - 1.0) > 1e-6)
    throw std::invalid_argument("overlap_stat: inputs must be unit lp-normalized");

  auto tq = top_k_indices(q, kappa);
  auto td = top_k_indices(d, kappa);
  std::sort(tq.begin(), tq.end());
  std::sort(td.begin(), td.end());

  // value lookup by coordinate
  const auto value_at = [](const SparseVector& v, int coord) {
    const auto it = std::lower_bound(v.indices.begin(), v.indices.end(), coord);
    return v.values[static_cast<std::size_t>(it - v.indices.begin())];
  };

  double s = 0.0;
  std::size_t i = 0, j = 0;
  while (i < tq.size() && j < td.size()) {
    if (tq[i] == td[j]) {
      s += std::min(pow_p(value_at(q, tq[i]), p), pow_p(value_at(d, td[j]), p));
      ++i, ++j;
    } else if (tq[i] < td[j]) {
      ++i;
    } else {
      ++j;
    }
  }
  return s;
}

OverlapParams overlap_params(std::span<const double> overlap_stats) {
  if (overlap_stats.empty())
    throw std::invalid_argument("overlap_params: empty sample");
  OverlapParams out;
  double smallest_positive = std::numeric_limits<double>::infinity();
  std::size_t positive = 0;
  for (double s : overlap_stats) {
    if (s > 0.0) {
      ++positive;
      smallest_positive = std::min(smallest_positive, s);
    }
  }
  const double n = static_cast<double>(overlap_stats.size());
  out.pi_max = static_cast<double>(positive) / n;
  if (positive == 0) {
    out.degenerate = true;
    return out;
  }
  out.gamma = smallest_positive;
  std::size_t at_least_gamma = 0;
  for (double s : overlap_stats)
    if (s >= out.gamma) ++at_least_gamma;
  out.pi_hat = static_cast<double>(at_least_gamma) / n;
  return out;
}

OverlapParams overlap_params(std::span<const SparseVector> queries,
                             std::span<const SparseVector> docs,
                             std::span<const std::pair<int, int>> pairs,
                             int kappa, double p) {
  if (pairs.empty()) throw std::invalid_argument("overlap_params: empty pair sample");
  std::vector<double> stats;
  stats.reserve(pairs.size());
  for (const auto& [qi, di] : pairs)
    stats.push_back(overlap_stat(queries[static_cast<std::size_t>(qi)],
                                 docs[static_cast<std::size_t>(di)], kappa, p));
  return overlap_params(stats);
}

TauEstimate estimate_tau(std::span<const SparseVector> vectors, int kappa, int m) {
  if (vectors.empty()) throw std::invalid_argument("estimate_tau: empty sample");
  if (m < 1) throw std::invalid_argument("estimate_tau: m must be >= 1");
  std::unordered_map<int, int> counts;
  for (const auto& v : vectors)
    for (int coord : top_k_indices(v, kappa)) ++counts[coord];
  int max_count = 0;
  for (const auto& [coord, count] : counts) max_count = std::max(max_count, count);
  TauEstimate out;
  out.tau = static_cast<double>(m) * static_cast<double>(max_count) /
            static_cast<double>(vectors.size());
  out.small_sample = vectors.size() == 1;
  return out;
}

SparseTheoremConstants sparse_gap(double alpha, double gamma, double rho,
                                  double pi, double p) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("sparse_gap: alpha must be in (0, 1)");
  if (!(rho > 0.0 && rho < 1.0 + 1e-12))
    throw std::invalid_argument("sparse_gap: rho must be in (0, 1]");
  if (pi == 1.0) throw std::invalid_argument("sparse_gap: pi = 1 (division by zero)");
  if (!(pi > 0.0 && pi < 1.0))
    throw std::invalid_argument("sparse_gap: pi must be in (0, 1)");
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument("sparse_gap: gamma must be in [0, 1]");
  if (!(p >= 1.0)) throw std::invalid_argument("sparse_gap: p must be >= 1");

  SparseTheoremConstants out;
  out.p = p;
  out.alpha = alpha;
  out.rho = rho;
  out.gamma = gamma;
  out.pi_hat = pi;
  out.X = std::pow(2.0 - 2.0 * gamma, 1.0 / p);
  out.Y = rho * std::pow(2.0, 1.0 / p) *
          (std::pow(alpha, 1.0 / p) - std::pow(1.0 - alpha, 1.0 / p)) / (1.0 - pi);
  out.gap = out.Y - out.X;
  out.relvar_bound = out.gap > 0.0 ? (pi / 4.0) * out.gap * out.gap : 0.0;
  out.theorem_applicable = out.gap > 0.0;
  return out;
}

SparseTheoremConstants validate_sparse(std::span<const SparseVector> queries,
                                       std::span<const SparseVector> docs,
                                       int kappa, double alpha, double rho_target,
                                       double p,
                                       const SparseValidationOptions& opts) {
  if (queries.empty()) throw std::invalid_argument("validate_sparse: empty query sample");
  if (docs.empty()) throw std::invalid_argument("validate_sparse: empty document sample");
  for (const auto& v : queries)
    if (std::abs(sparse_lp_norm(v, p) - 1.0) > 1e-6)
      throw DataError("validate_sparse: queries must be unit lp-normalized");
  for (const auto& v : docs)
    if (std::abs(sparse_lp_norm(v, p) - 1.0) > 1e-6)
      throw DataError("validate_sparse: documents must be unit lp-normalized");

  const CoiSelection sel = select_R(docs, kappa, alpha, rho_target, p, opts.R_max);

  std::size_t coi_queries = 0;
  for (const auto& q : queries)
    if (coi(q, kappa, p) >= alpha) ++coi_queries;

  // Uniform seeded pair sample.
  auto rng = stream_rng(opts.sample_seed, {0x9a17u});
  std::uniform_int_distribution<int> pick_q(0, static_cast<int>(queries.size()) - 1);
  std::uniform_int_distribution<int> pick_d(0, static_cast<int>(docs.size()) - 1);
  std::vector<std::pair<int, int>> pairs(static_cast<std::size_t>(opts.pair_sample));
  for (auto& pr : pairs) pr = {pick_q(rng), pick_d(rng)};
  const OverlapParams overlap = overlap_params(queries, docs, pairs, kappa, p);

  const TauEstimate tau_q = estimate_tau(queries, kappa, queries.front().dim);
  const TauEstimate tau_d = estimate_tau(docs, kappa, docs.front().dim);

  SparseTheoremConstants out;
  if (!overlap.degenerate) {
    // pi = 1 propagates sparse_gap's division-by-zero error.
    out = sparse_gap(alpha, overlap.gamma, std::max(sel.rho, 1e-12), overlap.pi_hat, p);
  } else {
    out.p = p;
    out.alpha = alpha;
    out.rho = sel.rho;
    out.gamma = 0.0;
    out.pi_hat = 0.0;
    out.theorem_applicable = false;
  }
  out.kappa = kappa;
  out.R = sel.R;
  out.rho = sel.rho;
  out.tau = std::max(tau_q.tau, tau_d.tau);
  out.query_coi_rate =
      static_cast<double>(coi_queries) / static_cast<double>(queries.size());
  out.coi_ok = sel.ok;
  out.overlap_degenerate = overlap.degenerate;
  out.theorem_applicable =
      out.theorem_applicable && sel.ok && !overlap.degenerate && out.gap > 0.0;
  return out;
}

}  // namespace vsl
