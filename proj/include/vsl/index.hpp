#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vsl/vectors.hpp"

namespace vsl {

struct SearchResult {
  std::vector<int> ids;             // unique, tie-broken ascending
  std::vector<double> distances;    // nondecreasing, aligned with ids
};

// Exact top-k, ascending distance, ties by ascending id; truncates when
// k > |docs|.
SearchResult brute_force_topk(const DenseVector& q, const PointMatrix& docs,
                              const Metric& metric, int k);

// Exact top-k for a whole query batch. Uses a blocked Gram-matrix path for
// l2/cosine; per-query results match brute_force_topk exactly.
std::vector<SearchResult> exact_topk_batch(const PointMatrix& queries,
                                           const PointMatrix& docs,
                                           const Metric& metric, int k,
                                           int threads = 1);

// --- IVF ---------------------------------------------------------------

struct IvfIndex {
  PointMatrix centroids;               // nlist rows
  std::vector<std::vector<int>> lists; // partition of [0, n)
  Metric metric;
  PointMatrix docs;
};

// k-means with farthest-point seeding, at most 20 Lloyd iterations or
// centroid movement < 1e-4; empty clusters are re-seeded from the largest
// cluster's farthest member. Deterministic given the seed for any thread
// count: the parallel part is the per-point assignment map, and all
// reductions stay sequential in id order.
IvfIndex ivf_build(const PointMatrix& docs, int nlist, const Metric& metric,
                   std::uint64_t seed, int threads = 1);

// Exhaustive scan of the nprobes lists whose centroids are nearest to q.
SearchResult ivf_search(const IvfIndex& index, const DenseVector& q, int nprobes,
                        int k);

// --- HNSW-style graph ----------------------------------------------------

struct GraphIndex {
  // layers[l][node] = neighbor ids; layer 0 covers every node, upper layers
  // only nodes whose level reaches them.
  std::vector<std::vector<std::vector<int>>> layers;
  std::vector<int> levels;  // per-node top layer
  int entry_point = -1;
  int max_level = 0;
  int M = 16;
  int ef_construction = 200;
  Metric metric;
  PointMatrix docs;
};

// Layered construction: geometric level assignment with normalization
// 1/ln(M), greedy descent, candidate beam of ef_construction, plain
// M-closest neighbor selection (no diversification pruning). Degree caps:
// M per upper layer, 2M at the base layer.
GraphIndex graph_build(const PointMatrix& docs, int M, int ef_construction,
                       const Metric& metric, std::uint64_t seed);

// Greedy descent through the upper layers, then a beam of ef_search at the
// base layer; returns the best k visited. Requires k <= ef_search.
SearchResult graph_search(const GraphIndex& index, const DenseVector& q,
                          int ef_search, int k);

// |approx[0..k) intersect exact[0..k)| / k.
double recall_at_k(const SearchResult& approx, const SearchResult& exact, int k);

// --- Persistence ----------------------------------------------------------
//
// Versioned little-endian container, magic "VSLIDX1", with a section table;
// loads reject mismatched magic or version.

void save_index(const IvfIndex& index, const std::string& path);
void save_index(const GraphIndex& index, const std::string& path);
IvfIndex load_ivf_index(const std::string& path);
GraphIndex load_graph_index(const std::string& path);

}  // namespace vsl
