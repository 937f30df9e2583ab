#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vsl/aggregation.hpp"
#include "vsl/filtered.hpp"
#include "vsl/vectors.hpp"

namespace vsl {

// All generators are deterministic: each output vector draws from its own
// stream derived from (seed, tag, index), so the same seed and parameters
// give bitwise-identical output regardless of chunking (see rng.hpp).

// Every coordinate iid standard normal: the classic contrast-free
// construction.
std::vector<DenseVector> gen_iid_gaussian(int n, int m, std::uint64_t seed);

// Points around n_clusters centers (centers iid normal, rescaled to l2 norm
// sqrt(m)); per-coordinate noise sigma = spread; uniform assignment. The
// centers depend only on (seed, m), so one call can be split into queries
// and documents that share the cluster structure.
std::vector<DenseVector> gen_clustered(int n, int m, int n_clusters,
                                       double spread, std::uint64_t seed);

// Every component of a vector equals one N(0,1) draw: distances scale as
// m^{1/p} |v1 - v2|, so relative spread is dimension-free.
std::vector<DenseVector> gen_equal_component(int n, int m, std::uint64_t seed);

struct AntipodalDefaults {
  // Document sets come in families sharing a base group; each query is a
  // noisy copy of one group's bases, so it has genuinely near document sets.
  int docs_per_group = 10;
  // Per-query-set noise scale ~ U[min, max] * noise; the shared scale makes
  // the positional nearest-neighbor distances positively correlated.
  double query_scale_min = 0.5;
  double query_scale_max = 1.5;
};

// Cosine-adversarial multi-vector construction: each document set holds, for
// every unit base vector b, the noisy pair (b + eps, -b + eps'). The
// negation applies to the shared base, so pair sums of cosine distances
// cancel up to the noise; at noise = 0 the closure is exactly bitwise.
// Queries are noisy copies of a document group's bases.
MultiVectorProblem gen_antipodal_multivec(int n_docs, int n_queries, int set_size,
                                          int m, double noise, std::uint64_t seed,
                                          const AntipodalDefaults& defaults = {});

struct FilteredDataset {
  std::vector<FilteredPoint> queries;
  std::vector<FilteredPoint> docs;
  FilterKind kind = FilterKind::subset_match;
  double measured_mismatch = 0.0;  // exact fraction of mismatching documents
};

// Unit-normalized Gaussian vectors; the ceil(p_mismatch * n_docs) documents
// closest to the queries on average receive a mismatching attribute, the
// rest the queries' attribute (subset semantics). Mismatch correlates
// negatively with distance by construction.
FilteredDataset gen_filtered(int n_docs, int n_queries, int m, double p_mismatch,
                             std::uint64_t seed);

enum class SparseRegime { coi_and_overlap, coi_only, overlap_only, neither };

SparseRegime parse_sparse_regime(const std::string& name);
std::string to_string(SparseRegime regime);

struct SparseGenDefaults {
  int head_size = 8;           // aligned head width (coordinates)
  int wide_head_size = 32;     // scattered head size for overlap_only
  double head_mass = 0.88;     // lp^p mass in the head, concentrated regimes
  double diluted_mass = 0.55;  // lp^p mass in the head, diluted regimes
  double central_mix = 0.71;   // P(central window) for coi_and_overlap
  double value_jitter = 0.10;  // relative per-value jitter
};

// Sparse vectors with a Zipf-shaped head placed in a coordinate window and a
// flat tail over the remaining support; output is exactly lp-normalized.
// coi_and_overlap aligns heavy heads on one shared narrow window;
// coi_only and neither align heads on per-vector windows whose slot grid
// outgrows the collection as m grows (with heavy and diluted head mass
// respectively); overlap_only scatters a fixed-size diluted head inside one
// shared window of width ~m/8, so head overlap is common at low dimensions
// and pairwise alignment decays as m grows.
std::vector<SparseVector> gen_sparse_semantic(int n, int m, int nnz, double zipf_s,
                                              SparseRegime regime, std::uint64_t seed,
                                              double p = 2.0,
                                              const SparseGenDefaults& defaults = {});

}  // namespace vsl
