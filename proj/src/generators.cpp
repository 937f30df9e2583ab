#include "vsl/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <unordered_set>

#include "vsl/rng.hpp"

namespace vsl {

namespace {

// Stream tags; one per draw role so streams never collide across roles.
constexpr std::uint64_t kTagIid = 0x01;
constexpr std::uint64_t kTagClusterCenter = 0x02;
constexpr std::uint64_t kTagClusterPoint = 0x03;
constexpr std::uint64_t kTagEqual = 0x04;
constexpr std::uint64_t kTagBase = 0x05;
constexpr std::uint64_t kTagDocNoise = 0x06;
constexpr std::uint64_t kTagQueryNoise = 0x07;
constexpr std::uint64_t kTagQueryScale = 0x08;
constexpr std::uint64_t kTagFilteredQuery = 0x09;
constexpr std::uint64_t kTagFilteredDoc = 0x0a;
constexpr std::uint64_t kTagSparse = 0x0b;
constexpr std::uint64_t kTagSlotPerm = 0x0c;

DenseVector gaussian_vector(std::mt19937_64& rng, int m) {
  std::normal_distribution<double> normal(0.0, 1.0);
  DenseVector v(m);
  for (int i = 0; i < m; ++i) v[i] = normal(rng);
  return v;
}

// Noise direction with expected norm ~1 regardless of dimension.
DenseVector unit_scale_noise(std::mt19937_64& rng, int m) {
  return gaussian_vector(rng, m) / std::sqrt(static_cast<double>(m));
}

void check_nm(int n, int m, const char* what) {
  if (n < 1 || m < 1)
    throw std::invalid_argument(std::string(what) + ": n and m must be >= 1");
}

}  // namespace

std::vector<DenseVector> gen_iid_gaussian(int n, int m, std::uint64_t seed) {
  check_nm(n, m, "gen_iid_gaussian");
  std::vector<DenseVector> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto rng = stream_rng(seed, {kTagIid, static_cast<std::uint64_t>(i)});
    out[static_cast<std::size_t>(i)] = gaussian_vector(rng, m);
  }
  return out;
}

std::vector<DenseVector> gen_clustered(int n, int m, int n_clusters, double spread,
                                       std::uint64_t seed) {
  check_nm(n, m, "gen_clustered");
  if (n_clusters < 2)
    throw std::invalid_argument("gen_clustered: n_clusters must be >= 2");
  if (!(spread > 0.0)) throw std::invalid_argument("gen_clustered: spread must be > 0");

  std::vector<DenseVector> centers(static_cast<std::size_t>(n_clusters));
  for (int c = 0; c < n_clusters; ++c) {
    auto rng = stream_rng(seed, {kTagClusterCenter, static_cast<std::uint64_t>(c)});
    DenseVector center = gaussian_vector(rng, m);
    const double norm = center.norm();
    if (norm == 0.0) center[0] = 1.0;  // measure-zero draw, keep deterministic
    centers[static_cast<std::size_t>(c)] =
        center * (std::sqrt(static_cast<double>(m)) / center.norm());
  }

  std::vector<DenseVector> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto rng = stream_rng(seed, {kTagClusterPoint, static_cast<std::uint64_t>(i)});
    std::uniform_int_distribution<int> pick(0, n_clusters - 1);
    const int c = pick(rng);
    out[static_cast<std::size_t>(i)] =
        centers[static_cast<std::size_t>(c)] + spread * gaussian_vector(rng, m);
  }
  return out;
}

std::vector<DenseVector> gen_equal_component(int n, int m, std::uint64_t seed) {
  check_nm(n, m, "gen_equal_component");
  std::vector<DenseVector> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto rng = stream_rng(seed, {kTagEqual, static_cast<std::uint64_t>(i)});
    std::normal_distribution<double> normal(0.0, 1.0);
    out[static_cast<std::size_t>(i)] = DenseVector::Constant(m, normal(rng));
  }
  return out;
}

MultiVectorProblem gen_antipodal_multivec(int n_docs, int n_queries, int set_size,
                                          int m, double noise, std::uint64_t seed,
                                          const AntipodalDefaults& defaults) {
  if (n_docs < 1 || n_queries < 1)
    throw std::invalid_argument("gen_antipodal_multivec: need docs and queries");
  if (set_size < 1)
    throw std::invalid_argument("gen_antipodal_multivec: set_size must be >= 1");
  if (m < 1) throw std::invalid_argument("gen_antipodal_multivec: m must be >= 1");
  if (!(noise >= 0.0))
    throw std::invalid_argument("gen_antipodal_multivec: noise must be >= 0");

  const int n_groups = std::max(1, n_docs / std::max(1, defaults.docs_per_group));
  const auto base = [&](int group, int l) {
    auto rng = stream_rng(
        seed, {kTagBase, static_cast<std::uint64_t>(group) *
                                 static_cast<std::uint64_t>(set_size) +
                             static_cast<std::uint64_t>(l)});
    DenseVector b = gaussian_vector(rng, m);
    if (b.norm() == 0.0) b[0] = 1.0;
    return DenseVector(b / b.norm());
  };

  MultiVectorProblem problem;
  problem.metric = Metric::cosine();

  problem.documents.resize(static_cast<std::size_t>(n_docs));
  for (int j = 0; j < n_docs; ++j) {
    const int group = j % n_groups;
    VectorSet& set = problem.documents[static_cast<std::size_t>(j)];
    set.reserve(2 * static_cast<std::size_t>(set_size));
    for (int l = 0; l < set_size; ++l) {
      const DenseVector b = base(group, l);
      const std::uint64_t entry =
          (static_cast<std::uint64_t>(j) * static_cast<std::uint64_t>(set_size) +
           static_cast<std::uint64_t>(l)) *
          2;
      auto rng_pos = stream_rng(seed, {kTagDocNoise, entry});
      auto rng_neg = stream_rng(seed, {kTagDocNoise, entry + 1});
      set.push_back(b + noise * unit_scale_noise(rng_pos, m));
      set.push_back(-b + noise * unit_scale_noise(rng_neg, m));
    }
  }

  problem.queries.resize(static_cast<std::size_t>(n_queries));
  for (int i = 0; i < n_queries; ++i) {
    const int group = i % n_groups;
    auto rng_scale = stream_rng(seed, {kTagQueryScale, static_cast<std::uint64_t>(i)});
    std::uniform_real_distribution<double> pick_scale(defaults.query_scale_min,
                                                      defaults.query_scale_max);
    const double scale = pick_scale(rng_scale);
    VectorSet& set = problem.queries[static_cast<std::size_t>(i)];
    set.reserve(static_cast<std::size_t>(set_size));
    for (int l = 0; l < set_size; ++l) {
      auto rng = stream_rng(
          seed, {kTagQueryNoise, static_cast<std::uint64_t>(i) *
                                         static_cast<std::uint64_t>(set_size) +
                                     static_cast<std::uint64_t>(l)});
      set.push_back(base(group, l) + noise * scale * unit_scale_noise(rng, m));
    }
  }
  return problem;
}

FilteredDataset gen_filtered(int n_docs, int n_queries, int m, double p_mismatch,
                             std::uint64_t seed) {
  if (n_docs < 1 || n_queries < 1)
    throw std::invalid_argument("gen_filtered: need docs and queries");
  if (m < 1) throw std::invalid_argument("gen_filtered: m must be >= 1");
  if (!(p_mismatch > 0.0 && p_mismatch < 1.0))
    throw std::invalid_argument("gen_filtered: p_mismatch must be in (0, 1)");

  FilteredDataset out;
  out.kind = FilterKind::subset_match;

  PointMatrix queries(n_queries, m);
  for (int i = 0; i < n_queries; ++i) {
    auto rng = stream_rng(seed, {kTagFilteredQuery, static_cast<std::uint64_t>(i)});
    DenseVector q = gaussian_vector(rng, m);
    if (q.norm() == 0.0) q[0] = 1.0;
    queries.row(i) = (q / q.norm()).transpose();
  }
  PointMatrix docs(n_docs, m);
  for (int j = 0; j < n_docs; ++j) {
    auto rng = stream_rng(seed, {kTagFilteredDoc, static_cast<std::uint64_t>(j)});
    DenseVector d = gaussian_vector(rng, m);
    if (d.norm() == 0.0) d[0] = 1.0;
    docs.row(j) = (d / d.norm()).transpose();
  }

  // Mean l2 distance of each document to the whole query set; on unit
  // vectors ||d - q||^2 = 2 - 2 <d, q>.
  Eigen::MatrixXd grams = docs * queries.transpose();
  std::vector<double> mean_dist(static_cast<std::size_t>(n_docs), 0.0);
  for (int j = 0; j < n_docs; ++j) {
    double sum = 0.0;
    for (int i = 0; i < n_queries; ++i)
      sum += std::sqrt(std::max(0.0, 2.0 - 2.0 * grams(j, i)));
    mean_dist[static_cast<std::size_t>(j)] = sum / static_cast<double>(n_queries);
  }

  std::vector<int> order(static_cast<std::size_t>(n_docs));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    const double da = mean_dist[static_cast<std::size_t>(a)];
    const double db = mean_dist[static_cast<std::size_t>(b)];
    if (da != db) return da < db;
    return a < b;
  });
  const int n_mismatch = static_cast<int>(
      std::ceil(p_mismatch * static_cast<double>(n_docs)));
  std::vector<bool> mismatch(static_cast<std::size_t>(n_docs), false);
  for (int r = 0; r < n_mismatch; ++r)
    mismatch[static_cast<std::size_t>(order[static_cast<std::size_t>(r)])] = true;

  const std::string match_token = "eligible";
  out.queries.resize(static_cast<std::size_t>(n_queries));
  for (int i = 0; i < n_queries; ++i) {
    out.queries[static_cast<std::size_t>(i)].vector = queries.row(i).transpose();
    out.queries[static_cast<std::size_t>(i)].attrs = {match_token};
  }
  out.docs.resize(static_cast<std::size_t>(n_docs));
  for (int j = 0; j < n_docs; ++j) {
    out.docs[static_cast<std::size_t>(j)].vector = docs.row(j).transpose();
    out.docs[static_cast<std::size_t>(j)].attrs =
        mismatch[static_cast<std::size_t>(j)] ? AttributeSet{"blocked"}
                                              : AttributeSet{match_token};
  }
  out.measured_mismatch = static_cast<double>(n_mismatch) / static_cast<double>(n_docs);
  return out;
}

SparseRegime parse_sparse_regime(const std::string& name) {
  if (name == "coi_and_overlap") return SparseRegime::coi_and_overlap;
  if (name == "coi_only") return SparseRegime::coi_only;
  if (name == "overlap_only") return SparseRegime::overlap_only;
  if (name == "neither") return SparseRegime::neither;
  throw std::invalid_argument("unknown sparse regime '" + name + "'");
}

std::string to_string(SparseRegime regime) {
  switch (regime) {
    case SparseRegime::coi_and_overlap: return "coi_and_overlap";
    case SparseRegime::coi_only: return "coi_only";
    case SparseRegime::overlap_only: return "overlap_only";
    case SparseRegime::neither: return "neither";
  }
  throw std::logic_error("to_string(SparseRegime): unknown value");
}

std::vector<SparseVector> gen_sparse_semantic(int n, int m, int nnz, double zipf_s,
                                              SparseRegime regime, std::uint64_t seed,
                                              double p,
                                              const SparseGenDefaults& defaults) {
  if (n < 1 || m < 1) throw std::invalid_argument("gen_sparse_semantic: n, m >= 1");
  if (nnz < 1 || nnz > m)
    throw std::invalid_argument("gen_sparse_semantic: need 1 <= nnz <= m");
  if (!(zipf_s > 0.0))
    throw std::invalid_argument("gen_sparse_semantic: zipf_s must be > 0");
  if (!(p >= 1.0)) throw std::invalid_argument("gen_sparse_semantic: p must be >= 1");

  const bool concentrated =
      regime == SparseRegime::coi_and_overlap || regime == SparseRegime::coi_only;
  const double beta = concentrated ? defaults.head_mass : defaults.diluted_mass;

  // Head geometry per regime. Aligned regimes write the head onto a narrow
  // window (rank j at window offset j), so same-window vectors align exactly
  // and the slot grid m/W controls how often that happens: a shared central
  // slot keeps the alignment rate dimension-free, while per-vector slots run
  // out of collisions as the grid outgrows the collection. The wide regime
  // scatters a fixed-size head inside a window growing with m, so pairwise
  // alignment itself decays like 1/m even though every vector stays in the
  // shared window.
  const bool wide = regime == SparseRegime::overlap_only;
  const int head = wide ? std::min({defaults.wide_head_size, nnz, m})
                        : std::min(defaults.head_size, nnz);
  const int window = wide ? std::min(m, std::max(2 * head, m / 8)) : head;
  const int slots = std::max(1, m / window);
  const int central_slot = slots / 3;

  // Per-vector window permutation for the non-overlap regimes: distinct slots
  // until the slot space is exhausted, then wrap.
  std::vector<int> perm(static_cast<std::size_t>(slots));
  std::iota(perm.begin(), perm.end(), 0);
  {
    auto rng = stream_rng(seed, {kTagSlotPerm});
    std::shuffle(perm.begin(), perm.end(), rng);
  }

  std::vector<SparseVector> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto rng = stream_rng(seed, {kTagSparse, static_cast<std::uint64_t>(i)});
    std::uniform_real_distribution<double> uni01(0.0, 1.0);
    std::uniform_real_distribution<double> jitter(-defaults.value_jitter,
                                                  defaults.value_jitter);

    int slot;
    if (wide) {
      slot = central_slot;
    } else if (regime == SparseRegime::coi_and_overlap) {
      if (slots == 1 || uni01(rng) < defaults.central_mix) {
        slot = central_slot;
      } else {
        std::uniform_int_distribution<int> pick(0, slots - 2);
        slot = pick(rng);
        if (slot >= central_slot) ++slot;  // uniform over non-central slots
      }
    } else {
      slot = perm[static_cast<std::size_t>(i % slots)];
    }
    const int w0 = std::min(slot * window, m - window);

    std::vector<std::pair<int, double>> entries;
    entries.reserve(static_cast<std::size_t>(nnz));

    double head_power = 0.0;
    std::vector<double> head_vals(static_cast<std::size_t>(head));
    for (int j = 0; j < head; ++j) {
      const double v =
          std::pow(static_cast<double>(j + 1), -zipf_s) * (1.0 + jitter(rng));
      head_vals[static_cast<std::size_t>(j)] = v;
      head_power += std::pow(v, p);
    }
    const double head_scale = std::pow(beta / head_power, 1.0 / p);
    std::vector<int> head_coords(static_cast<std::size_t>(head));
    if (wide) {
      // Rank values land on per-vector random positions inside the window.
      std::vector<int> positions(static_cast<std::size_t>(window));
      std::iota(positions.begin(), positions.end(), w0);
      std::shuffle(positions.begin(), positions.end(), rng);
      for (int j = 0; j < head; ++j)
        head_coords[static_cast<std::size_t>(j)] = positions[static_cast<std::size_t>(j)];
    } else {
      for (int j = 0; j < head; ++j) head_coords[static_cast<std::size_t>(j)] = w0 + j;
    }
    for (int j = 0; j < head; ++j)
      entries.emplace_back(head_coords[static_cast<std::size_t>(j)],
                           head_vals[static_cast<std::size_t>(j)] * head_scale);

    const int tail = nnz - head;
    if (tail > 0) {
      std::unordered_set<int> used;
      std::uniform_int_distribution<int> pick_coord(0, m - 1);
      std::vector<int> tail_coords;
      tail_coords.reserve(static_cast<std::size_t>(tail));
      while (static_cast<int>(tail_coords.size()) < tail) {
        const int c = pick_coord(rng);
        if (c >= w0 && c < w0 + window) continue;
        if (!used.insert(c).second) continue;
        tail_coords.push_back(c);
      }
      double tail_power = 0.0;
      std::vector<double> tail_vals(static_cast<std::size_t>(tail));
      for (int t = 0; t < tail; ++t) {
        const double v = 1.0 + jitter(rng);
        tail_vals[static_cast<std::size_t>(t)] = v;
        tail_power += std::pow(v, p);
      }
      const double tail_scale = std::pow((1.0 - beta) / tail_power, 1.0 / p);
      for (int t = 0; t < tail; ++t)
        entries.emplace_back(tail_coords[static_cast<std::size_t>(t)],
                             tail_vals[static_cast<std::size_t>(t)] * tail_scale);
    }

    std::sort(entries.begin(), entries.end());
    SparseVector& v = out[static_cast<std::size_t>(i)];
    v.dim = m;
    v.indices.reserve(entries.size());
    v.values.reserve(entries.size());
    for (const auto& [coord, val] : entries) {
      v.indices.push_back(coord);
      v.values.push_back(val);
    }
    const double norm = sparse_lp_norm(v, p);
    for (auto& val : v.values) val /= norm;
  }
  return out;
}

}  // namespace vsl
