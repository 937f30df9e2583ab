#include "vsl/index.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "vsl/parallel.hpp"
#include "vsl/rng.hpp"

namespace vsl {

namespace {

using ScoredId = std::pair<double, int>;  // (distance, id), lexicographic order

// Shares the scalar kernels with the public distance functions, so results
// are bitwise comparable across the library and its tests.
double row_distance(const Metric& metric, const PointMatrix& docs, Eigen::Index row,
                    const Eigen::RowVectorXd& q) {
  return metric_distance(metric, docs.row(row), q);
}

SearchResult to_result(std::vector<ScoredId> scored, int k) {
  std::sort(scored.begin(), scored.end());
  if (scored.size() > static_cast<std::size_t>(k)) scored.resize(k);
  SearchResult out;
  out.ids.reserve(scored.size());
  out.distances.reserve(scored.size());
  for (const auto& [dist, id] : scored) {
    out.ids.push_back(id);
    out.distances.push_back(dist);
  }
  return out;
}

void check_query(const DenseVector& q, const PointMatrix& docs, const char* what) {
  if (docs.rows() == 0) throw std::invalid_argument(std::string(what) + ": empty docs");
  if (q.size() != docs.cols())
    throw std::invalid_argument(std::string(what) + ": query dimension mismatch");
}

}  // namespace

SearchResult brute_force_topk(const DenseVector& q, const PointMatrix& docs,
                              const Metric& metric, int k) {
  check_query(q, docs, "brute_force_topk");
  if (k < 1) throw std::invalid_argument("brute_force_topk: k must be >= 1");
  const Eigen::RowVectorXd qr = q.transpose();
  std::vector<ScoredId> scored(static_cast<std::size_t>(docs.rows()));
  for (Eigen::Index i = 0; i < docs.rows(); ++i)
    scored[static_cast<std::size_t>(i)] = {row_distance(metric, docs, i, qr),
                                           static_cast<int>(i)};
  return to_result(std::move(scored), k);
}

std::vector<SearchResult> exact_topk_batch(const PointMatrix& queries,
                                           const PointMatrix& docs,
                                           const Metric& metric, int k, int threads) {
  if (queries.rows() == 0) throw std::invalid_argument("exact_topk_batch: no queries");
  if (docs.rows() == 0) throw std::invalid_argument("exact_topk_batch: empty docs");
  if (queries.cols() != docs.cols())
    throw std::invalid_argument("exact_topk_batch: dimension mismatch");
  if (k < 1) throw std::invalid_argument("exact_topk_batch: k must be >= 1");

  const Eigen::Index nq = queries.rows();
  const Eigen::Index nd = docs.rows();
  std::vector<SearchResult> results(static_cast<std::size_t>(nq));

  const bool fast = metric.kind == Metric::Kind::cosine ||
                    (metric.kind == Metric::Kind::lp && metric.p == 2.0);
  if (!fast) {
    parallel_for(nq, threads, [&](std::int64_t i) {
      results[static_cast<std::size_t>(i)] =
          brute_force_topk(queries.row(i).transpose(), docs, metric, k);
    });
    return results;
  }

  // Gram-matrix preselection in query blocks, then an exact recompute of the
  // shortlisted candidates with the same kernel brute_force_topk uses.
  Eigen::VectorXd doc_sq(nd);
  for (Eigen::Index j = 0; j < nd; ++j) doc_sq[j] = docs.row(j).squaredNorm();
  const int margin = std::min<Eigen::Index>(nd, std::max(2 * k, k + 64));

  const Eigen::Index block = 64;
  for (Eigen::Index start = 0; start < nq; start += block) {
    const Eigen::Index rows = std::min(block, nq - start);
    const Eigen::MatrixXd gram =
        docs * queries.middleRows(start, rows).transpose();  // nd x rows
    parallel_for(rows, threads, [&](std::int64_t r) {
      const Eigen::Index qi = start + r;
      const double q_sq = queries.row(qi).squaredNorm();
      std::vector<ScoredId> scored(static_cast<std::size_t>(nd));
      if (metric.kind == Metric::Kind::cosine) {
        const double qn = std::sqrt(q_sq);
        if (qn == 0.0) throw std::invalid_argument("exact_topk_batch: zero-norm query");
        for (Eigen::Index j = 0; j < nd; ++j) {
          const double dn = std::sqrt(doc_sq[j]);
          if (dn == 0.0)
            throw std::invalid_argument("exact_topk_batch: zero-norm document");
          const double c = std::clamp(gram(j, r) / (qn * dn), -1.0, 1.0);
          scored[static_cast<std::size_t>(j)] = {1.0 - c, static_cast<int>(j)};
        }
      } else {
        for (Eigen::Index j = 0; j < nd; ++j) {
          const double sq = std::max(0.0, q_sq + doc_sq[j] - 2.0 * gram(j, r));
          scored[static_cast<std::size_t>(j)] = {sq, static_cast<int>(j)};
        }
      }
      std::nth_element(scored.begin(), scored.begin() + (margin - 1), scored.end());
      scored.resize(static_cast<std::size_t>(margin));
      const Eigen::RowVectorXd qr = queries.row(qi);
      for (auto& [dist, id] : scored) dist = row_distance(metric, docs, id, qr);
      results[static_cast<std::size_t>(qi)] = to_result(std::move(scored), k);
    });
  }
  return results;
}

// --- IVF -------------------------------------------------------------------

IvfIndex ivf_build(const PointMatrix& docs, int nlist, const Metric& metric,
                   std::uint64_t seed, int threads) {
  const Eigen::Index n = docs.rows();
  if (n == 0) throw std::invalid_argument("ivf_build: empty docs");
  if (nlist < 1 || nlist > n)
    throw std::invalid_argument("ivf_build: need 1 <= nlist <= n");

  // Farthest-point seeding from a seeded start.
  auto rng = stream_rng(seed, {0x17f});
  std::uniform_int_distribution<std::int64_t> pick(0, n - 1);
  PointMatrix centroids(nlist, docs.cols());
  centroids.row(0) = docs.row(pick(rng));
  std::vector<double> nearest(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());
  for (int c = 1; c < nlist; ++c) {
    const Eigen::RowVectorXd prev = centroids.row(c - 1);
    parallel_for(n, threads, [&](std::int64_t i) {
      auto& slot = nearest[static_cast<std::size_t>(i)];
      slot = std::min(slot, row_distance(metric, docs, i, prev));
    });
    Eigen::Index far_id = 0;
    double far_dist = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (nearest[static_cast<std::size_t>(i)] > far_dist) {
        far_dist = nearest[static_cast<std::size_t>(i)];
        far_id = i;
      }
    }
    centroids.row(c) = docs.row(far_id);
  }

  std::vector<int> assignment(static_cast<std::size_t>(n), 0);
  const auto assign_all = [&]() {
    parallel_for(n, threads, [&](std::int64_t i) {
      int best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      const Eigen::RowVectorXd row = docs.row(i);
      for (int c = 0; c < nlist; ++c) {
        const double d = row_distance(metric, centroids, c, row);
        if (d < best_dist) {
          best_dist = d;
          best = c;
        }
      }
      assignment[static_cast<std::size_t>(i)] = best;
    });
  };

  constexpr int kMaxIters = 20;
  constexpr double kMoveTol = 1e-4;
  for (int iter = 0; iter < kMaxIters; ++iter) {
    assign_all();

    std::vector<std::vector<int>> members(static_cast<std::size_t>(nlist));
    for (Eigen::Index i = 0; i < n; ++i)
      members[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])]
          .push_back(static_cast<int>(i));

    // Re-seed empty clusters from the largest cluster's farthest member.
    for (int c = 0; c < nlist; ++c) {
      auto& own = members[static_cast<std::size_t>(c)];
      if (!own.empty()) continue;
      int largest = 0;
      for (int o = 1; o < nlist; ++o)
        if (members[static_cast<std::size_t>(o)].size() >
            members[static_cast<std::size_t>(largest)].size())
          largest = o;
      auto& source = members[static_cast<std::size_t>(largest)];
      if (source.size() < 2) continue;  // nothing to steal
      const Eigen::RowVectorXd centroid = centroids.row(largest);
      std::size_t far_pos = 0;
      double far_dist = -1.0;
      for (std::size_t s = 0; s < source.size(); ++s) {
        const double d = row_distance(metric, docs, source[s], centroid);
        if (d > far_dist) {
          far_dist = d;
          far_pos = s;
        }
      }
      const int stolen = source[far_pos];
      source.erase(source.begin() + static_cast<std::ptrdiff_t>(far_pos));
      own.push_back(stolen);
      assignment[static_cast<std::size_t>(stolen)] = c;
    }

    double max_move = 0.0;
    for (int c = 0; c < nlist; ++c) {
      const auto& own = members[static_cast<std::size_t>(c)];
      if (own.empty()) continue;
      Eigen::RowVectorXd mean = Eigen::RowVectorXd::Zero(docs.cols());
      for (int id : own) mean += docs.row(id);
      mean /= static_cast<double>(own.size());
      max_move = std::max(max_move, (mean - centroids.row(c)).norm());
      centroids.row(c) = mean;
    }
    if (max_move < kMoveTol) break;
  }

  assign_all();
  IvfIndex index;
  index.centroids = std::move(centroids);
  index.metric = metric;
  index.docs = docs;
  index.lists.assign(static_cast<std::size_t>(nlist), {});
  for (Eigen::Index i = 0; i < n; ++i)
    index.lists[static_cast<std::size_t>(assignment[static_cast<std::size_t>(i)])]
        .push_back(static_cast<int>(i));
  return index;
}

SearchResult ivf_search(const IvfIndex& index, const DenseVector& q, int nprobes,
                        int k) {
  check_query(q, index.docs, "ivf_search");
  const int nlist = static_cast<int>(index.lists.size());
  if (nprobes < 1 || nprobes > nlist)
    throw std::invalid_argument("ivf_search: need 1 <= nprobes <= nlist");
  if (k < 1) throw std::invalid_argument("ivf_search: k must be >= 1");

  const Eigen::RowVectorXd qr = q.transpose();
  std::vector<ScoredId> by_centroid(static_cast<std::size_t>(nlist));
  for (int c = 0; c < nlist; ++c)
    by_centroid[static_cast<std::size_t>(c)] = {
        row_distance(index.metric, index.centroids, c, qr), c};
  std::sort(by_centroid.begin(), by_centroid.end());

  std::vector<ScoredId> scored;
  for (int p = 0; p < nprobes; ++p) {
    for (int id : index.lists[static_cast<std::size_t>(by_centroid[static_cast<std::size_t>(p)].second)])
      scored.emplace_back(row_distance(index.metric, index.docs, id, qr), id);
  }
  return to_result(std::move(scored), k);
}

// --- HNSW-style graph --------------------------------------------------------

namespace {

struct LayerSearchScratch {
  std::vector<std::uint8_t> visited;
};

// Beam search within one layer from the given entry points; returns up to ef
// results sorted ascending by (distance, id).
std::vector<ScoredId> search_layer(const PointMatrix& docs, const Metric& metric,
                                   const std::vector<std::vector<int>>& adjacency,
                                   const Eigen::RowVectorXd& q,
                                   const std::vector<ScoredId>& entries, int ef,
                                   LayerSearchScratch& scratch) {
  auto& visited = scratch.visited;
  std::fill(visited.begin(), visited.end(), 0);

  std::priority_queue<ScoredId, std::vector<ScoredId>, std::greater<>> candidates;
  std::priority_queue<ScoredId> results;  // max-heap: worst on top
  for (const auto& e : entries) {
    if (visited[static_cast<std::size_t>(e.second)]) continue;
    visited[static_cast<std::size_t>(e.second)] = 1;
    candidates.push(e);
    results.push(e);
  }
  while (results.size() > static_cast<std::size_t>(ef)) results.pop();

  while (!candidates.empty()) {
    const ScoredId current = candidates.top();
    candidates.pop();
    if (results.size() >= static_cast<std::size_t>(ef) && current > results.top())
      break;
    for (int nb : adjacency[static_cast<std::size_t>(current.second)]) {
      if (visited[static_cast<std::size_t>(nb)]) continue;
      visited[static_cast<std::size_t>(nb)] = 1;
      const ScoredId scored{row_distance(metric, docs, nb, q), nb};
      if (results.size() < static_cast<std::size_t>(ef) || scored < results.top()) {
        candidates.push(scored);
        results.push(scored);
        if (results.size() > static_cast<std::size_t>(ef)) results.pop();
      }
    }
  }

  std::vector<ScoredId> out(results.size());
  for (std::size_t i = results.size(); i-- > 0;) {
    out[i] = results.top();
    results.pop();
  }
  return out;
}

}  // namespace

GraphIndex graph_build(const PointMatrix& docs, int M, int ef_construction,
                       const Metric& metric, std::uint64_t seed) {
  const Eigen::Index n = docs.rows();
  if (n == 0) throw std::invalid_argument("graph_build: empty docs");
  if (M < 2) throw std::invalid_argument("graph_build: M must be >= 2");
  if (ef_construction < 1)
    throw std::invalid_argument("graph_build: ef_construction must be >= 1");

  GraphIndex index;
  index.M = M;
  index.ef_construction = ef_construction;
  index.metric = metric;
  index.docs = docs;
  index.levels.assign(static_cast<std::size_t>(n), 0);

  const double level_norm = 1.0 / std::log(static_cast<double>(M));
  auto rng = stream_rng(seed, {0x9f5});
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  constexpr int kLevelCap = 30;
  int top = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double u = std::max(uni(rng), 1e-300);
    const int level = std::min(kLevelCap, static_cast<int>(-std::log(u) * level_norm));
    index.levels[static_cast<std::size_t>(i)] = level;
    top = std::max(top, level);
  }
  index.layers.resize(static_cast<std::size_t>(top) + 1);
  for (auto& layer : index.layers)
    layer.assign(static_cast<std::size_t>(n), {});

  LayerSearchScratch scratch;
  scratch.visited.assign(static_cast<std::size_t>(n), 0);

  // TEMP calibration switch, removed after tuning.
  const char* variant_env = std::getenv("VSL_GRAPH_VARIANT");
  const std::string variant = variant_env ? variant_env : "plain";
  const bool heuristic_select = variant.rfind("heur", 0) == 0 ||
                                variant.rfind("hnswlib", 0) == 0 ||
                                variant == "capM_heur";
  const bool heuristic_shrink = variant.rfind("hnswlib", 0) == 0;
  int base_cap = 2 * M;
  if (variant == "capM" || variant == "capM_heur") base_cap = M;
  if (variant == "hnswlib20" || variant == "heur20") base_cap = 20;
  if (variant == "hnswlib24" || variant == "heur24") base_cap = 24;
  const auto cap_for = [M, base_cap](int layer) {
    return layer == 0 ? base_cap : M;
  };
  const auto diversify = [&](const std::vector<ScoredId>& candidates, int cap) {
    std::vector<ScoredId> selected;
    for (const auto& cand : candidates) {
      if (static_cast<int>(selected.size()) >= cap) break;
      bool keep = true;
      for (const auto& kept : selected) {
        const double between =
            metric_distance(metric, docs.row(cand.second), docs.row(kept.second));
        if (between < cand.first) {
          keep = false;
          break;
        }
      }
      if (keep) selected.push_back(cand);
    }
    return selected;
  };

  index.entry_point = 0;
  index.max_level = index.levels[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    const int level = index.levels[static_cast<std::size_t>(i)];
    const Eigen::RowVectorXd q = docs.row(i);
    std::vector<ScoredId> entries{
        {row_distance(metric, docs, index.entry_point, q), index.entry_point}};

    for (int layer = index.max_level; layer > level; --layer)
      entries = search_layer(docs, metric, index.layers[static_cast<std::size_t>(layer)],
                             q, entries, 1, scratch);

    for (int layer = std::min(level, index.max_level); layer >= 0; --layer) {
      auto candidates =
          search_layer(docs, metric, index.layers[static_cast<std::size_t>(layer)], q,
                       entries, ef_construction, scratch);
      std::vector<ScoredId> selected;
      if (heuristic_select) {
        selected = diversify(candidates, M);
      } else {
        selected.assign(candidates.begin(),
                        candidates.begin() +
                            std::min<std::size_t>(M, candidates.size()));
      }
      const std::size_t take = selected.size();
      auto& adjacency = index.layers[static_cast<std::size_t>(layer)];
      for (std::size_t s = 0; s < take; ++s) {
        const int nb = selected[s].second;
        adjacency[static_cast<std::size_t>(i)].push_back(nb);
        auto& list = adjacency[static_cast<std::size_t>(nb)];
        list.push_back(static_cast<int>(i));
        const int cap = cap_for(layer);
        if (static_cast<int>(list.size()) > cap) {
          const Eigen::RowVectorXd owner = docs.row(nb);
          std::vector<ScoredId> scored;
          scored.reserve(list.size());
          for (int member : list)
            scored.emplace_back(row_distance(metric, docs, member, owner), member);
          std::sort(scored.begin(), scored.end());
          if (heuristic_shrink) {
            const auto kept = diversify(scored, cap);
            list.clear();
            for (const auto& [dist, id] : kept) list.push_back(id);
          } else {
            list.clear();
            for (int s2 = 0; s2 < cap; ++s2)
              list.push_back(scored[static_cast<std::size_t>(s2)].second);
          }
        }
      }
      entries = std::move(candidates);
    }

    if (level > index.max_level) {
      index.max_level = level;
      index.entry_point = static_cast<int>(i);
    }
  }
  return index;
}

SearchResult graph_search(const GraphIndex& index, const DenseVector& q,
                          int ef_search, int k) {
  check_query(q, index.docs, "graph_search");
  if (k < 1) throw std::invalid_argument("graph_search: k must be >= 1");
  if (k > ef_search)
    throw std::invalid_argument("graph_search: k must be <= ef_search");

  const Eigen::RowVectorXd qr = q.transpose();
  LayerSearchScratch scratch;
  scratch.visited.assign(static_cast<std::size_t>(index.docs.rows()), 0);

  std::vector<ScoredId> entries{
      {row_distance(index.metric, index.docs, index.entry_point, qr),
       index.entry_point}};
  for (int layer = index.max_level; layer > 0; --layer)
    entries = search_layer(index.docs, index.metric,
                           index.layers[static_cast<std::size_t>(layer)], qr, entries,
                           1, scratch);
  auto found = search_layer(index.docs, index.metric, index.layers[0], qr, entries,
                            ef_search, scratch);
  return to_result(std::move(found), k);
}

double recall_at_k(const SearchResult& approx, const SearchResult& exact, int k) {
  if (k < 1) throw std::invalid_argument("recall_at_k: k must be >= 1");
  if (exact.ids.size() < static_cast<std::size_t>(k))
    throw std::invalid_argument("recall_at_k: exact result has fewer than k entries");
  std::vector<int> truth(exact.ids.begin(), exact.ids.begin() + k);
  std::sort(truth.begin(), truth.end());
  int hits = 0;
  const std::size_t limit = std::min<std::size_t>(k, approx.ids.size());
  for (std::size_t i = 0; i < limit; ++i)
    if (std::binary_search(truth.begin(), truth.end(), approx.ids[i])) ++hits;
  return static_cast<double>(hits) / static_cast<double>(k);
}

// --- Persistence --------------------------------------------------------------

namespace {

constexpr char kMagic[7] = {'V', 'S', 'L', 'I', 'D', 'X', '1'};
constexpr std::uint32_t kVersion = 1;
constexpr std::uint32_t kKindIvf = 1;
constexpr std::uint32_t kKindGraph = 2;

struct Section {
  std::uint32_t tag;
  std::string payload;
};

template <typename T>
void put(std::string& buf, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  char raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  buf.append(raw, sizeof(T));
}

void put_matrix(std::string& buf, const PointMatrix& m) {
  put<std::uint64_t>(buf, static_cast<std::uint64_t>(m.rows()));
  put<std::uint32_t>(buf, static_cast<std::uint32_t>(m.cols()));
  buf.append(reinterpret_cast<const char*>(m.data()),
             sizeof(double) * static_cast<std::size_t>(m.size()));
}

void put_metric(std::string& buf, const Metric& metric) {
  put<std::uint32_t>(buf, metric.kind == Metric::Kind::cosine ? 1u : 0u);
  put<double>(buf, metric.p);
}

class Reader {
 public:
  explicit Reader(std::string data) : data_(std::move(data)) {}

  template <typename T>
  T get() {
    static_assert(std::is_trivially_copyable_v<T>);
    if (pos_ + sizeof(T) > data_.size()) throw DataError("index file: truncated");
    T value;
    std::memcpy(&value, data_.data() + pos_, sizeof(T));
    pos_ += sizeof(T);
    return value;
  }

  PointMatrix get_matrix() {
    const auto rows = get<std::uint64_t>();
    const auto cols = get<std::uint32_t>();
    const std::size_t bytes = sizeof(double) * rows * cols;
    if (pos_ + bytes > data_.size()) throw DataError("index file: truncated matrix");
    PointMatrix m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    std::memcpy(m.data(), data_.data() + pos_, bytes);
    pos_ += bytes;
    return m;
  }

  Metric get_metric() {
    const auto kind = get<std::uint32_t>();
    const double p = get<double>();
    return kind == 1u ? Metric::cosine() : Metric::lp(p);
  }

  bool done() const { return pos_ == data_.size(); }

 private:
  std::string data_;
  std::size_t pos_ = 0;
};

void write_container(const std::string& path, std::uint32_t kind,
                     const std::vector<Section>& sections) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path + "' for writing");
  std::string header;
  header.append(kMagic, sizeof(kMagic));
  put<std::uint32_t>(header, kVersion);
  put<std::uint32_t>(header, kind);
  put<std::uint32_t>(header, static_cast<std::uint32_t>(sections.size()));
  std::uint64_t offset = header.size() + sections.size() * (4 + 8 + 8);
  std::string table;
  for (const auto& s : sections) {
    put<std::uint32_t>(table, s.tag);
    put<std::uint64_t>(table, offset);
    put<std::uint64_t>(table, static_cast<std::uint64_t>(s.payload.size()));
    offset += s.payload.size();
  }
  out << header << table;
  for (const auto& s : sections) out << s.payload;
  if (!out) throw DataError("failed writing '" + path + "'");
}

std::vector<Section> read_container(const std::string& path, std::uint32_t want_kind) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::string data((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  if (data.size() < sizeof(kMagic) + 12) throw DataError("index file: truncated header");
  if (std::memcmp(data.data(), kMagic, sizeof(kMagic)) != 0)
    throw DataError("index file: bad magic");
  std::size_t pos = sizeof(kMagic);
  const auto read_u32 = [&](const char* what) {
    if (pos + 4 > data.size()) throw DataError(std::string("index file: truncated ") + what);
    std::uint32_t v;
    std::memcpy(&v, data.data() + pos, 4);
    pos += 4;
    return v;
  };
  const auto read_u64 = [&](const char* what) {
    if (pos + 8 > data.size()) throw DataError(std::string("index file: truncated ") + what);
    std::uint64_t v;
    std::memcpy(&v, data.data() + pos, 8);
    pos += 8;
    return v;
  };
  const std::uint32_t version = read_u32("version");
  if (version != kVersion)
    throw DataError("index file: unsupported version " + std::to_string(version));
  const std::uint32_t kind = read_u32("kind");
  if (kind != want_kind) throw DataError("index file: wrong index kind");
  const std::uint32_t count = read_u32("section count");
  std::vector<Section> sections(count);
  for (auto& s : sections) {
    s.tag = read_u32("section tag");
    const std::uint64_t off = read_u64("section offset");
    const std::uint64_t len = read_u64("section size");
    if (off + len > data.size()) throw DataError("index file: section out of range");
    s.payload = data.substr(off, len);
  }
  return sections;
}

const Section& find_section(const std::vector<Section>& sections, std::uint32_t tag) {
  for (const auto& s : sections)
    if (s.tag == tag) return s;
  throw DataError("index file: missing section " + std::to_string(tag));
}

constexpr std::uint32_t kSecMeta = 1;
constexpr std::uint32_t kSecCentroids = 2;
constexpr std::uint32_t kSecLists = 3;
constexpr std::uint32_t kSecDocs = 4;
constexpr std::uint32_t kSecLevels = 5;
constexpr std::uint32_t kSecEdges = 6;

}  // namespace

void save_index(const IvfIndex& index, const std::string& path) {
  std::vector<Section> sections;
  {
    Section meta{kSecMeta, {}};
    put_metric(meta.payload, index.metric);
    put<std::uint32_t>(meta.payload, static_cast<std::uint32_t>(index.lists.size()));
    sections.push_back(std::move(meta));
  }
  {
    Section cent{kSecCentroids, {}};
    put_matrix(cent.payload, index.centroids);
    sections.push_back(std::move(cent));
  }
  {
    Section lists{kSecLists, {}};
    put<std::uint32_t>(lists.payload, static_cast<std::uint32_t>(index.lists.size()));
    for (const auto& list : index.lists) {
      put<std::uint64_t>(lists.payload, static_cast<std::uint64_t>(list.size()));
      for (int id : list) put<std::int32_t>(lists.payload, id);
    }
    sections.push_back(std::move(lists));
  }
  {
    Section docs{kSecDocs, {}};
    put_matrix(docs.payload, index.docs);
    sections.push_back(std::move(docs));
  }
  write_container(path, kKindIvf, sections);
}

IvfIndex load_ivf_index(const std::string& path) {
  const auto sections = read_container(path, kKindIvf);
  IvfIndex index;
  {
    Reader r(find_section(sections, kSecMeta).payload);
    index.metric = r.get_metric();
    r.get<std::uint32_t>();  // nlist, re-derived from the lists section
  }
  {
    Reader r(find_section(sections, kSecCentroids).payload);
    index.centroids = r.get_matrix();
  }
  {
    Reader r(find_section(sections, kSecLists).payload);
    const auto nlist = r.get<std::uint32_t>();
    index.lists.resize(nlist);
    for (auto& list : index.lists) {
      const auto count = r.get<std::uint64_t>();
      list.resize(count);
      for (auto& id : list) id = r.get<std::int32_t>();
    }
    if (!r.done()) throw DataError("index file: trailing bytes in lists section");
  }
  {
    Reader r(find_section(sections, kSecDocs).payload);
    index.docs = r.get_matrix();
  }
  return index;
}

void save_index(const GraphIndex& index, const std::string& path) {
  std::vector<Section> sections;
  {
    Section meta{kSecMeta, {}};
    put_metric(meta.payload, index.metric);
    put<std::int32_t>(meta.payload, index.M);
    put<std::int32_t>(meta.payload, index.ef_construction);
    put<std::int32_t>(meta.payload, index.entry_point);
    put<std::int32_t>(meta.payload, index.max_level);
    sections.push_back(std::move(meta));
  }
  {
    Section levels{kSecLevels, {}};
    put<std::uint64_t>(levels.payload, static_cast<std::uint64_t>(index.levels.size()));
    for (int level : index.levels) put<std::int32_t>(levels.payload, level);
    sections.push_back(std::move(levels));
  }
  {
    Section edges{kSecEdges, {}};
    put<std::uint32_t>(edges.payload, static_cast<std::uint32_t>(index.layers.size()));
    for (const auto& layer : index.layers) {
      put<std::uint64_t>(edges.payload, static_cast<std::uint64_t>(layer.size()));
      for (const auto& list : layer) {
        put<std::uint32_t>(edges.payload, static_cast<std::uint32_t>(list.size()));
        for (int id : list) put<std::int32_t>(edges.payload, id);
      }
    }
    sections.push_back(std::move(edges));
  }
  {
    Section docs{kSecDocs, {}};
    put_matrix(docs.payload, index.docs);
    sections.push_back(std::move(docs));
  }
  write_container(path, kKindGraph, sections);
}

GraphIndex load_graph_index(const std::string& path) {
  const auto sections = read_container(path, kKindGraph);
  GraphIndex index;
  {
    Reader r(find_section(sections, kSecMeta).payload);
    index.metric = r.get_metric();
    index.M = r.get<std::int32_t>();
    index.ef_construction = r.get<std::int32_t>();
    index.entry_point = r.get<std::int32_t>();
    index.max_level = r.get<std::int32_t>();
  }
  {
    Reader r(find_section(sections, kSecLevels).payload);
    const auto n = r.get<std::uint64_t>();
    index.levels.resize(n);
    for (auto& level : index.levels) level = r.get<std::int32_t>();
  }
  {
    Reader r(find_section(sections, kSecEdges).payload);
    const auto n_layers = r.get<std::uint32_t>();
    index.layers.resize(n_layers);
    for (auto& layer : index.layers) {
      const auto n_nodes = r.get<std::uint64_t>();
      layer.resize(n_nodes);
      for (auto& list : layer) {
        const auto degree = r.get<std::uint32_t>();
        list.resize(degree);
        for (auto& id : list) id = r.get<std::int32_t>();
      }
    }
    if (!r.done()) throw DataError("index file: trailing bytes in edges section");
  }
  {
    Reader r(find_section(sections, kSecDocs).payload);
    index.docs = r.get_matrix();
  }
  if (index.entry_point < 0 ||
      index.entry_point >= static_cast<int>(index.docs.rows()))
    throw DataError("index file: entry point out of range");
  return index;
}

}  // namespace vsl
