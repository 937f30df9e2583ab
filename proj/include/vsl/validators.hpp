#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "vsl/aggregation.hpp"
#include "vsl/vectors.hpp"

namespace vsl {

// --- Multi-vector theorem conditions -------------------------------------

struct MultiVectorValidation {
  double c = 0.0;                        // empirical strong stability constant
  double nondegeneracy_pass_rate = 0.0;  // fraction of passing queries
  double covariance_sum = 0.0;           // sum over position pairs
  bool covariance_inconclusive = false;  // |sum| within 1e-6 of zero
  bool all_pass = false;
};

// Fraction of queries with c * max_k min_{d in D_k} delta(q, d) >=
// max_k max_{d in D_k} delta(q, d): some document set lies wholly far away.
double nondegeneracy_rate(std::span<const DenseVector> queries,
                          std::span<const VectorSet> doc_sets,
                          const Metric& metric, double c);

// Sum over i < j of the population covariance of the positional
// nearest-neighbor distances A_i = min_{d in docs} delta(q_i, d), sampled
// across equal-size query sets.
double covariance_sum(std::span<const VectorSet> query_sets,
                      std::span<const DenseVector> docs, const Metric& metric);

// The full pipeline: c from the induced instance, non-degeneracy at that c,
// then the covariance sum.
MultiVectorValidation validate_multivector(const MultiVectorProblem& problem);

// --- Filtered theorem threshold ------------------------------------------

// 2 * delta_max / (1 - p_max): a penalty strictly above this satisfies the
// filtered stability condition.
double filtered_threshold(double delta_max, double p_max);

// --- Sparse theorem constants ---------------------------------------------

// Concentration of importance C_v(kappa): the lp^p mass fraction of the
// top-kappa coordinates. Ties break by magnitude descending, then coordinate
// index ascending.
double coi(const SparseVector& v, int kappa, double p);
double coi(const DenseVector& v, int kappa, double p);

// Indices of the top-kappa coordinates by magnitude (same tie rule).
std::vector<int> top_k_indices(const SparseVector& v, int kappa);

struct CoiSelection {
  int R = 0;
  double rho = 0.0;  // empirical Pr[C_d(R*kappa) >= alpha] at the chosen R
  bool ok = false;   // false when no R <= R_max reaches the target
};

// Smallest R in [1, R_max] whose empirical document pass rate reaches
// rho_target; reports the failing rate at R_max otherwise.
CoiSelection select_R(std::span<const SparseVector> docs, int kappa,
                      double alpha, double rho_target, double p,
                      int R_max = 8);

// Overlap statistic S = sum over shared top-kappa coordinates of
// min(q_i^p, d_i^p). Requires unit lp norms within 1e-6.
double overlap_stat(const SparseVector& q, const SparseVector& d, int kappa,
                    double p);

struct OverlapParams {
  double gamma = 0.0;   // smallest strictly positive overlap observed
  double pi_hat = 0.0;  // fraction of pairs with S >= gamma
  double pi_max = 0.0;  // fraction of pairs with S > 0
  bool degenerate = false;  // no pair overlapped at all
};

// Estimated from precomputed overlap statistics; pi_hat equals pi_max by the
// chosen quantile rule.
OverlapParams overlap_params(std::span<const double> overlap_stats);

OverlapParams overlap_params(std::span<const SparseVector> queries,
                             std::span<const SparseVector> docs,
                             std::span<const std::pair<int, int>> pairs,
                             int kappa, double p);

struct TauEstimate {
  double tau = 0.0;
  bool small_sample = false;  // single-vector sample: frequencies are 0/1
};

// tau_hat = m * max over coordinates of the top-kappa membership frequency.
TauEstimate estimate_tau(std::span<const SparseVector> vectors, int kappa, int m);

// One row of the sparse theorem-constant table plus the validator flags.
struct SparseTheoremConstants {
  double p = 2.0;
  double alpha = 0.0;
  int kappa = 0;
  int R = 0;
  double rho = 0.0;
  double gamma = 0.0;
  double pi_hat = 0.0;
  double tau = 0.0;
  double X = 0.0;             // (2 - 2*gamma)^(1/p)
  double Y = 0.0;             // rho * 2^(1/p) * (alpha^(1/p) - (1-alpha)^(1/p)) / (1 - pi)
  double gap = 0.0;           // Y - X
  double relvar_bound = 0.0;  // (pi/4) * gap^2 when gap > 0, else 0
  double query_coi_rate = 1.0;
  bool coi_ok = true;             // document rho target reached at some R <= R_max
  bool overlap_degenerate = false;
  bool theorem_applicable = false;  // all assumptions held and gap > 0
};

// Closed-form evaluation of X, Y, gap and the relvar lower bound. A
// non-positive gap is reported as such (theorem inapplicable), never
// auto-tuned.
SparseTheoremConstants sparse_gap(double alpha, double gamma, double rho,
                                  double pi, double p);

struct SparseValidationOptions {
  int pair_sample = 10000;
  std::uint64_t sample_seed = 0x5eedULL;
  int R_max = 8;
};

// The full estimation recipe: select_R over documents, overlap over sampled
// query-document pairs, tau over both sides, then the closed-form gap.
SparseTheoremConstants validate_sparse(std::span<const SparseVector> queries,
                                       std::span<const SparseVector> docs,
                                       int kappa, double alpha,
                                       double rho_target, double p,
                                       const SparseValidationOptions& opts = {});

}  // namespace vsl
