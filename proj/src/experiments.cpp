#include "vsl/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <json.hpp>
#include <set>
#include <sstream>

#include "vsl/aggregation.hpp"
#include "vsl/filtered.hpp"
#include "vsl/generators.hpp"
#include "vsl/index.hpp"
#include "vsl/io.hpp"
#include "vsl/parallel.hpp"
#include "vsl/rng.hpp"
#include "vsl/stability.hpp"
#include "vsl/validators.hpp"

namespace vsl {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSeedDim = 0xd1;
constexpr std::uint64_t kSeedIvf = 0xd2;
constexpr std::uint64_t kSeedGraph = 0xd3;

// --- config parsing ---------------------------------------------------------

void check_keys(const json& obj, const std::string& where,
                const std::set<std::string>& allowed) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

template <typename T>
T get_required(const json& obj, const std::string& key) {
  if (!obj.contains(key)) throw ConfigError("missing required key '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError("bad value for '" + key + "': " + e.what());
  }
}

Metric parse_metric(const json& obj) {
  check_keys(obj, "metric", {"kind", "p"});
  const auto kind = get_required<std::string>(obj, "kind");
  if (kind == "cosine") {
    if (obj.contains("p")) throw ConfigError("metric: 'p' is only valid for lp");
    return Metric::cosine();
  }
  if (kind == "lp") {
    const double p = get_or<double>(obj, "p", 2.0);
    if (!(p >= 1.0)) throw ConfigError("metric: p must be >= 1");
    return Metric::lp(p);
  }
  throw ConfigError("metric: unknown kind '" + kind + "'");
}

GeneratorConfig parse_generator(const json& obj) {
  check_keys(obj, "generator",
             {"name", "n_clusters", "spread", "set_size", "noise", "nnz", "zipf_s"});
  GeneratorConfig g;
  g.name = get_required<std::string>(obj, "name");
  static const std::set<std::string> known = {
      "iid_gaussian", "clustered",      "equal_component",
      "antipodal",    "filtered",       "sparse_semantic"};
  if (!known.count(g.name)) throw ConfigError("generator: unknown name '" + g.name + "'");
  g.n_clusters = get_or<int>(obj, "n_clusters", 5);
  g.spread = get_or<double>(obj, "spread", 0.3);
  g.set_size = get_or<int>(obj, "set_size", 4);
  g.noise = get_or<double>(obj, "noise", 0.1);
  g.nnz = get_or<int>(obj, "nnz", 0);
  g.zipf_s = get_or<double>(obj, "zipf_s", 1.1);
  return g;
}

InputsConfig parse_inputs(const json& obj) {
  check_keys(obj, "inputs", {"queries", "docs", "query_attrs", "doc_attrs"});
  InputsConfig in;
  in.queries = get_or<std::string>(obj, "queries", "");
  in.docs = get_or<std::string>(obj, "docs", "");
  in.query_attrs = get_or<std::string>(obj, "query_attrs", "");
  in.doc_attrs = get_or<std::string>(obj, "doc_attrs", "");
  if (in.queries.empty() || in.docs.empty())
    throw ConfigError("inputs: 'queries' and 'docs' are required");
  return in;
}

IndexConfig parse_index(const json& obj) {
  check_keys(obj, "index", {"nlist", "nprobes", "M", "ef_construction", "ef_search"});
  IndexConfig idx;
  idx.nlist = get_or<int>(obj, "nlist", 0);
  idx.nprobes = get_or<int>(obj, "nprobes", 0);
  idx.M = get_or<int>(obj, "M", 16);
  idx.ef_construction = get_or<int>(obj, "ef_construction", 200);
  idx.ef_search = get_or<int>(obj, "ef_search", 200);
  return idx;
}

const std::set<std::string> kCommonKeys = {"kind", "label", "seed", "threads", "out"};

std::set<std::string> with_common(std::set<std::string> keys) {
  keys.insert(kCommonKeys.begin(), kCommonKeys.end());
  return keys;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");

  ExperimentConfig config;
  config.kind = get_required<std::string>(root, "kind");

  static const std::set<std::string> kinds = {"sweep", "multivec", "filtered",
                                              "sparse", "recall", "validate",
                                              "gen", "inspect"};
  if (!kinds.count(config.kind))
    throw ConfigError("unknown experiment kind '" + config.kind + "'");

  config.label = get_or<std::string>(root, "label", config.kind);
  config.seed = get_or<std::uint64_t>(root, "seed", 0);
  config.threads = get_or<int>(root, "threads", 1);
  if (config.threads < 1) throw ConfigError("threads must be >= 1");
  config.out = get_or<std::string>(root, "out", "");

  const auto parse_dataset_fields = [&](bool dims_required) {
    config.dims = get_or<std::vector<int>>(root, "dims", {});
    config.n_docs = get_or<int>(root, "n_docs", 0);
    config.n_queries = get_or<int>(root, "n_queries", 0);
    if (root.contains("metric")) config.metric = parse_metric(root.at("metric"));
    if (root.contains("generator"))
      config.generator = parse_generator(root.at("generator"));
    if (root.contains("inputs")) config.inputs = parse_inputs(root.at("inputs"));
    if (config.generator.has_value() == config.inputs.has_value())
      throw ConfigError("exactly one of 'generator' and 'inputs' must be present");
    if (config.generator) {
      if (dims_required && config.dims.empty())
        throw ConfigError("'dims' must be nonempty for generated experiments");
      for (std::size_t i = 1; i < config.dims.size(); ++i)
        if (config.dims[i] <= config.dims[i - 1])
          throw ConfigError("'dims' must be strictly increasing");
      if (config.n_docs < 1 || config.n_queries < 1)
        throw ConfigError("'n_docs' and 'n_queries' must be >= 1");
    } else if (!config.dims.empty()) {
      throw ConfigError("'dims' is only valid with a generator (inputs carry their own dimension)");
    }
  };

  if (config.kind == "sweep") {
    check_keys(root, "config", with_common({"dims", "n_docs", "n_queries", "metric",
                                            "generator", "inputs"}));
    parse_dataset_fields(true);
    if (config.generator && config.generator->name != "iid_gaussian" &&
        config.generator->name != "clustered" &&
        config.generator->name != "equal_component")
      throw ConfigError("sweep: generator must be a dense collection generator");
  } else if (config.kind == "multivec") {
    check_keys(root, "config", with_common({"dims", "n_docs", "n_queries", "metric",
                                            "generator", "inputs", "agg"}));
    parse_dataset_fields(true);
    config.agg = get_or<std::string>(root, "agg", "chamfer");
    if (config.agg != "chamfer" && config.agg != "avgpool")
      throw ConfigError("multivec: agg must be 'chamfer' or 'avgpool'");
    if (config.generator && config.generator->name != "antipodal")
      throw ConfigError("multivec: generator must be 'antipodal'");
  } else if (config.kind == "filtered") {
    check_keys(root, "config", with_common({"dims", "n_docs", "n_queries", "metric",
                                            "generator", "inputs", "alpha",
                                            "p_mismatch"}));
    if (!root.contains("generator") && !root.contains("inputs"))
      throw ConfigError("filtered: needs a generator or inputs");
    parse_dataset_fields(true);
    if (config.generator && config.generator->name != "filtered")
      throw ConfigError("filtered: generator must be 'filtered'");
    if (!root.contains("alpha")) throw ConfigError("filtered: missing 'alpha'");
    if (root.at("alpha").is_string()) {
      if (root.at("alpha").get<std::string>() != "inf")
        throw ConfigError("filtered: alpha must be a number >= 0 or \"inf\"");
      config.alpha_infinite = true;
    } else {
      config.alpha = get_required<double>(root, "alpha");
      if (!(config.alpha >= 0.0)) throw ConfigError("filtered: alpha must be >= 0");
    }
    config.p_mismatch = get_or<double>(root, "p_mismatch", 0.5);
    if (!(config.p_mismatch > 0.0 && config.p_mismatch < 1.0))
      throw ConfigError("filtered: p_mismatch must be in (0, 1)");
  } else if (config.kind == "sparse") {
    check_keys(root, "config", with_common({"dims", "n_docs", "n_queries", "generator",
                                            "inputs", "regime", "kappa",
                                            "alpha_target", "rho_target", "p"}));
    parse_dataset_fields(true);
    if (config.generator && config.generator->name != "sparse_semantic")
      throw ConfigError("sparse: generator must be 'sparse_semantic'");
    config.regime = get_or<std::string>(root, "regime", "coi_and_overlap");
    parse_sparse_regime(config.regime);  // validates
    config.kappa = get_or<int>(root, "kappa", 8);
    config.alpha_target = get_or<double>(root, "alpha_target", 0.83);
    config.rho_target = get_or<double>(root, "rho_target", 0.9);
    config.p = get_or<double>(root, "p", 2.0);
    if (config.kappa < 1) throw ConfigError("sparse: kappa must be >= 1");
    if (!(config.p >= 1.0)) throw ConfigError("sparse: p must be >= 1");
  } else if (config.kind == "recall") {
    check_keys(root, "config", with_common({"dims", "n_docs", "n_queries", "metric",
                                            "generator", "inputs", "index", "k"}));
    parse_dataset_fields(true);
    if (config.generator && config.generator->name != "iid_gaussian" &&
        config.generator->name != "clustered" &&
        config.generator->name != "equal_component")
      throw ConfigError("recall: generator must be a dense collection generator");
    if (root.contains("index")) config.index = parse_index(root.at("index"));
    config.k = get_or<int>(root, "k", 10);
    if (config.k != 10)
      throw ConfigError("recall: only k = 10 is supported (statistic recall_at_10)");
  } else if (config.kind == "validate") {
    check_keys(root, "config",
               with_common({"target", "dims", "n_docs", "n_queries", "metric",
                            "generator", "inputs", "kappa", "alpha_target",
                            "rho_target", "p"}));
    config.target = get_required<std::string>(root, "target");
    if (config.target != "multivec" && config.target != "sparse")
      throw ConfigError("validate: target must be 'multivec' or 'sparse'");
    parse_dataset_fields(true);
    if (config.generator) {
      if (config.target == "multivec" && config.generator->name != "antipodal")
        throw ConfigError("validate: multivec target needs the 'antipodal' generator");
      if (config.target == "sparse" && config.generator->name != "sparse_semantic")
        throw ConfigError("validate: sparse target needs the 'sparse_semantic' generator");
      if (config.dims.size() != 1)
        throw ConfigError("validate: 'dims' must hold exactly one dimension");
    }
    config.kappa = get_or<int>(root, "kappa", 8);
    config.alpha_target = get_or<double>(root, "alpha_target", 0.83);
    config.rho_target = get_or<double>(root, "rho_target", 0.9);
    config.p = get_or<double>(root, "p", 2.0);
  } else if (config.kind == "gen") {
    check_keys(root, "config",
               with_common({"generator", "n", "dim", "n_docs", "n_queries",
                            "p_mismatch", "regime", "queries_out", "attrs_out",
                            "query_attrs_out"}));
    if (!root.contains("generator")) throw ConfigError("gen: missing 'generator'");
    config.generator = parse_generator(root.at("generator"));
    config.n = get_or<int>(root, "n", 0);
    config.dim = get_required<int>(root, "dim");
    config.n_docs = get_or<int>(root, "n_docs", 0);
    config.n_queries = get_or<int>(root, "n_queries", 0);
    config.p_mismatch = get_or<double>(root, "p_mismatch", 0.5);
    config.regime = get_or<std::string>(root, "regime", "coi_and_overlap");
    parse_sparse_regime(config.regime);
    config.queries_out = get_or<std::string>(root, "queries_out", "");
    config.attrs_out = get_or<std::string>(root, "attrs_out", "");
    config.query_attrs_out = get_or<std::string>(root, "query_attrs_out", "");
    if (config.out.empty()) throw ConfigError("gen: missing 'out'");
    if (config.dim < 1) throw ConfigError("gen: dim must be >= 1");
  } else if (config.kind == "inspect") {
    check_keys(root, "config", with_common({"path", "format"}));
    config.path = get_required<std::string>(root, "path");
    config.format = get_required<std::string>(root, "format");
    static const std::set<std::string> formats = {"dense", "sparse", "sets", "attrs"};
    if (!formats.count(config.format))
      throw ConfigError("inspect: format must be dense|sparse|sets|attrs");
  }
  return config;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_json(buf.str());
}

// --- pipelines ---------------------------------------------------------------

namespace {

std::uint64_t dim_seed(const ExperimentConfig& config, int dim) {
  return derive_stream(config.seed, {kSeedDim, static_cast<std::uint64_t>(dim)});
}

std::vector<DenseVector> make_dense_collection(const GeneratorConfig& g, int count,
                                               int dim, std::uint64_t seed) {
  if (g.name == "iid_gaussian") return gen_iid_gaussian(count, dim, seed);
  if (g.name == "clustered")
    return gen_clustered(count, dim, g.n_clusters, g.spread, seed);
  if (g.name == "equal_component") return gen_equal_component(count, dim, seed);
  throw ConfigError("not a dense collection generator: '" + g.name + "'");
}

void append_report_rows(std::vector<ReportRow>& rows, const StabilityReport& report) {
  const long pooled =
      static_cast<long>(report.n_queries) * static_cast<long>(report.n_docs);
  rows.push_back({report.config_label, report.dimension, Statistic::relvar,
                  report.relvar, pooled});
  rows.push_back({report.config_label, report.dimension, Statistic::ratio_median,
                  quantile(report.per_query_ratio, 0.5),
                  static_cast<long>(report.per_query_ratio.size())});
  rows.push_back({report.config_label, report.dimension, Statistic::ratio_p10,
                  quantile(report.per_query_ratio, 0.1),
                  static_cast<long>(report.per_query_ratio.size())});
}

int sparse_nnz_for(const GeneratorConfig& g, int dim) {
  const int rule = std::max(64, dim / 16);
  const int nnz = g.nnz > 0 ? g.nnz : rule;
  return std::min(nnz, dim);
}

void append_sparse_validation_rows(std::vector<ReportRow>& rows, std::string& notes,
                                   const std::string& label, int dim,
                                   const SparseTheoremConstants& v, int n_docs,
                                   int n_total, long pair_sample) {
  rows.push_back({label, dim, Statistic::rho, v.rho, n_docs});
  rows.push_back({label, dim, Statistic::tau, v.tau, n_total});
  rows.push_back({label, dim, Statistic::pi_hat, v.pi_hat, pair_sample});
  if (!v.overlap_degenerate) {
    rows.push_back({label, dim, Statistic::gamma, v.gamma, pair_sample});
    rows.push_back({label, dim, Statistic::X, v.X, pair_sample});
    rows.push_back({label, dim, Statistic::Y, v.Y, pair_sample});
    rows.push_back({label, dim, Statistic::gap, v.gap, pair_sample});
    rows.push_back({label, dim, Statistic::relvar_bound, v.relvar_bound, pair_sample});
  }

  std::ostringstream note;
  note << label << " dim=" << dim << ": ";
  if (v.theorem_applicable) {
    note << "theorem assumptions hold (gap=" << format_double(v.gap) << ")";
  } else {
    note << "theorem inapplicable with these parameters:";
    if (!v.coi_ok) note << " rho target missed at R_max (rho=" << format_double(v.rho) << ");";
    if (v.overlap_degenerate) note << " degenerate overlap (no pair with S > 0);";
    if (!v.overlap_degenerate && v.gap <= 0.0)
      note << " gap <= 0 (" << format_double(v.gap) << "); consider raising alpha/rho;";
  }
  note << "\n";
  notes += note.str();
}

// sweep ---------------------------------------------------------------------

RunResult run_sweep(const ExperimentConfig& config) {
  RunResult result;
  std::vector<StabilityReport> reports;
  const Metric metric = config.metric;
  const PairDistance distance = [metric](const DenseVector& a, const DenseVector& b) {
    return metric_distance(metric, a, b);
  };

  if (config.generator) {
    const DatasetGenerator generator = [&](int dim) {
      auto all = make_dense_collection(*config.generator,
                                       config.n_queries + config.n_docs, dim,
                                       dim_seed(config, dim));
      SweepDataset data;
      data.queries.assign(all.begin(), all.begin() + config.n_queries);
      data.docs.assign(all.begin() + config.n_queries, all.end());
      return data;
    };
    reports = stability_sweep(generator, config.dims, distance, config.label,
                              config.threads);
  } else {
    const auto queries = read_dense(config.inputs->queries);
    const auto docs = read_dense(config.inputs->docs);
    const int dim = static_cast<int>(queries.front().size());
    const std::vector<int> dims = {dim};
    const DatasetGenerator generator = [&](int) {
      return SweepDataset{queries, docs};
    };
    reports = stability_sweep(generator, dims, distance, config.label, config.threads);
  }

  for (const auto& report : reports) append_report_rows(result.rows, report);
  if (reports.size() >= 2) {
    const Verdict verdict = stability_verdict(reports);
    result.notes += config.label;
    result.notes += verdict == Verdict::unstable_evidence
                        ? ": UnstableEvidence (finite-sample; relvar vanished monotonically)\n"
                        : ": StableEvidence (finite-sample; relvar did not vanish)\n";
  }
  return result;
}

// multivec --------------------------------------------------------------------

RunResult run_multivec(const ExperimentConfig& config) {
  RunResult result;
  const Aggregation agg =
      config.agg == "chamfer" ? Aggregation::chamfer : Aggregation::avg_pool;

  const auto report_problem = [&](const MultiVectorProblem& problem, int dim) {
    const Eigen::MatrixXd matrix = agg_distance_matrix(problem, agg, config.threads);
    std::vector<std::vector<double>> per_query(
        static_cast<std::size_t>(matrix.rows()));
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
      per_query[static_cast<std::size_t>(i)].assign(matrix.row(i).begin(),
                                                    matrix.row(i).end());
    }
    append_report_rows(result.rows,
                       make_stability_report(dim, config.label, per_query,
                                             static_cast<int>(matrix.cols())));
  };

  if (config.generator) {
    for (int dim : config.dims) {
      const MultiVectorProblem problem = gen_antipodal_multivec(
          config.n_docs, config.n_queries, config.generator->set_size, dim,
          config.generator->noise, dim_seed(config, dim));
      report_problem(problem, dim);
    }
  } else {
    MultiVectorProblem problem;
    problem.metric = config.metric;
    for (auto& [id, set] : read_sets(config.inputs->queries))
      problem.queries.push_back(std::move(set));
    for (auto& [id, set] : read_sets(config.inputs->docs))
      problem.documents.push_back(std::move(set));
    const int dim = static_cast<int>(problem.queries.front().front().size());
    report_problem(problem, dim);
  }
  return result;
}

// filtered ----------------------------------------------------------------------

RunResult run_filtered(const ExperimentConfig& config) {
  RunResult result;
  const Penalty penalty =
      config.alpha_infinite ? Penalty::infinite() : Penalty::finite(config.alpha);

  const auto report_cell = [&](const std::vector<FilteredPoint>& queries,
                               const std::vector<FilteredPoint>& docs,
                               FilterKind kind, int dim) {
    std::vector<std::vector<double>> per_query(queries.size());
    std::vector<long> mismatches(queries.size(), 0);
    parallel_for(static_cast<std::int64_t>(queries.size()), config.threads,
                 [&](std::int64_t i) {
                   auto& row = per_query[static_cast<std::size_t>(i)];
                   row.reserve(docs.size());
                   for (const auto& doc : docs) {
                     if (!filter_match(queries[static_cast<std::size_t>(i)].attrs,
                                       doc.attrs, kind))
                       ++mismatches[static_cast<std::size_t>(i)];
                     const auto dist =
                         penalized_distance(queries[static_cast<std::size_t>(i)], doc,
                                            config.metric, kind, penalty);
                     if (dist) row.push_back(*dist);
                   }
                 });
    append_report_rows(result.rows,
                       make_stability_report(dim, config.label, per_query,
                                             static_cast<int>(docs.size())));
    long mismatch_total = 0;
    for (long m : mismatches) mismatch_total += m;
    const long pairs =
        static_cast<long>(queries.size()) * static_cast<long>(docs.size());
    result.rows.push_back({config.label, dim, Statistic::p_mismatch,
                           static_cast<double>(mismatch_total) /
                               static_cast<double>(pairs),
                           pairs});
  };

  if (config.generator) {
    for (int dim : config.dims) {
      const FilteredDataset data = gen_filtered(config.n_docs, config.n_queries, dim,
                                                config.p_mismatch,
                                                dim_seed(config, dim));
      report_cell(data.queries, data.docs, data.kind, dim);
    }
  } else {
    if (config.inputs->query_attrs.empty() || config.inputs->doc_attrs.empty())
      throw ConfigError("filtered inputs need 'query_attrs' and 'doc_attrs'");
    const auto qv = read_dense(config.inputs->queries);
    const auto dv = read_dense(config.inputs->docs);
    const auto make_points = [](const std::vector<DenseVector>& vectors,
                                const std::map<std::string, AttributeSet>& attrs) {
      std::vector<std::pair<std::string, DenseVector>> keyed;
      keyed.reserve(vectors.size());
      for (std::size_t i = 0; i < vectors.size(); ++i)
        keyed.emplace_back(std::to_string(i), vectors[i]);
      return join_attrs(keyed, attrs);
    };
    const auto queries = make_points(qv, read_attrs(config.inputs->query_attrs));
    const auto docs = make_points(dv, read_attrs(config.inputs->doc_attrs));
    report_cell(queries, docs, FilterKind::subset_match,
                static_cast<int>(qv.front().size()));
  }
  return result;
}

// sparse ------------------------------------------------------------------------

RunResult run_sparse(const ExperimentConfig& config) {
  RunResult result;
  const SparseRegime regime = parse_sparse_regime(config.regime);

  const auto report_cell = [&](const std::vector<SparseVector>& queries,
                               const std::vector<SparseVector>& docs, int dim) {
    std::vector<std::vector<double>> per_query(queries.size());
    parallel_for(static_cast<std::int64_t>(queries.size()), config.threads,
                 [&](std::int64_t i) {
                   auto& row = per_query[static_cast<std::size_t>(i)];
                   row.resize(docs.size());
                   for (std::size_t j = 0; j < docs.size(); ++j)
                     row[j] = sparse_lp_distance(queries[static_cast<std::size_t>(i)],
                                                 docs[j], config.p);
                 });
    append_report_rows(result.rows,
                       make_stability_report(dim, config.label, per_query,
                                             static_cast<int>(docs.size())));
    SparseValidationOptions opts;
    const SparseTheoremConstants v =
        validate_sparse(queries, docs, config.kappa, config.alpha_target,
                        config.rho_target, config.p, opts);
    append_sparse_validation_rows(result.rows, result.notes, config.label, dim, v,
                                  static_cast<int>(docs.size()),
                                  static_cast<int>(queries.size() + docs.size()),
                                  opts.pair_sample);
  };

  if (config.generator) {
    for (int dim : config.dims) {
      const int nnz = sparse_nnz_for(*config.generator, dim);
      auto all = gen_sparse_semantic(config.n_queries + config.n_docs, dim, nnz,
                                     config.generator->zipf_s, regime,
                                     dim_seed(config, dim), config.p);
      const std::vector<SparseVector> queries(all.begin(),
                                              all.begin() + config.n_queries);
      const std::vector<SparseVector> docs(all.begin() + config.n_queries, all.end());
      report_cell(queries, docs, dim);
    }
  } else {
    const auto queries = read_sparse(config.inputs->queries);
    const auto docs = read_sparse(config.inputs->docs);
    report_cell(queries, docs, queries.front().dim);
  }
  return result;
}

// recall --------------------------------------------------------------------------

RunResult run_recall(const ExperimentConfig& config) {
  RunResult result;

  const auto report_cell = [&](const PointMatrix& queries, const PointMatrix& docs,
                               int dim) {
    const int n_docs = static_cast<int>(docs.rows());
    const int n_queries = static_cast<int>(queries.rows());
    const int nlist =
        config.index.nlist > 0
            ? config.index.nlist
            : std::max(1, static_cast<int>(std::llround(std::sqrt(
                              static_cast<double>(n_docs)))));
    int nprobes = config.index.nprobes > 0
                      ? config.index.nprobes
                      : std::max(1, static_cast<int>(std::llround(
                                        std::sqrt(static_cast<double>(n_docs)) / 4.0)));
    nprobes = std::min(nprobes, nlist);

    const auto exact =
        exact_topk_batch(queries, docs, config.metric, config.k, config.threads);

    const IvfIndex ivf = ivf_build(docs, nlist, config.metric,
                                   derive_stream(config.seed, {kSeedIvf,
                                                 static_cast<std::uint64_t>(dim)}),
                                   config.threads);
    std::vector<double> ivf_recall(static_cast<std::size_t>(n_queries));
    parallel_for(n_queries, config.threads, [&](std::int64_t i) {
      const SearchResult found =
          ivf_search(ivf, queries.row(i).transpose(), nprobes, config.k);
      ivf_recall[static_cast<std::size_t>(i)] =
          recall_at_k(found, exact[static_cast<std::size_t>(i)], config.k);
    });

    const GraphIndex graph =
        graph_build(docs, config.index.M, config.index.ef_construction, config.metric,
                    derive_stream(config.seed, {kSeedGraph,
                                  static_cast<std::uint64_t>(dim)}));
    std::vector<double> graph_recall(static_cast<std::size_t>(n_queries));
    parallel_for(n_queries, config.threads, [&](std::int64_t i) {
      const SearchResult found = graph_search(graph, queries.row(i).transpose(),
                                              config.index.ef_search, config.k);
      graph_recall[static_cast<std::size_t>(i)] =
          recall_at_k(found, exact[static_cast<std::size_t>(i)], config.k);
    });

    const auto mean = [](const std::vector<double>& values) {
      double sum = 0.0;
      for (double v : values) sum += v;
      return sum / static_cast<double>(values.size());
    };
    result.rows.push_back({config.label + "/ivf", dim, Statistic::recall_at_10,
                           mean(ivf_recall), n_queries});
    result.rows.push_back({config.label + "/hnsw", dim, Statistic::recall_at_10,
                           mean(graph_recall), n_queries});
  };

  if (config.generator) {
    for (int dim : config.dims) {
      auto all = make_dense_collection(*config.generator,
                                       config.n_queries + config.n_docs, dim,
                                       dim_seed(config, dim));
      const PointMatrix all_matrix = to_matrix(all);
      const PointMatrix queries = all_matrix.topRows(config.n_queries);
      const PointMatrix docs = all_matrix.bottomRows(config.n_docs);
      report_cell(queries, docs, dim);
    }
  } else {
    const auto queries = read_dense(config.inputs->queries);
    const auto docs = read_dense(config.inputs->docs);
    report_cell(to_matrix(queries), to_matrix(docs),
                static_cast<int>(queries.front().size()));
  }
  return result;
}

// validate ---------------------------------------------------------------------

RunResult run_validate(const ExperimentConfig& config) {
  RunResult result;
  if (config.target == "multivec") {
    MultiVectorProblem problem;
    int dim = 0;
    if (config.generator) {
      dim = config.dims.front();
      problem = gen_antipodal_multivec(config.n_docs, config.n_queries,
                                       config.generator->set_size, dim,
                                       config.generator->noise,
                                       dim_seed(config, dim));
    } else {
      problem.metric = config.metric;
      for (auto& [id, set] : read_sets(config.inputs->queries))
        problem.queries.push_back(std::move(set));
      for (auto& [id, set] : read_sets(config.inputs->docs))
        problem.documents.push_back(std::move(set));
      dim = static_cast<int>(problem.queries.front().front().size());
    }
    const MultiVectorValidation v = validate_multivector(problem);
    const auto [induced_queries, induced_docs] = induced_instance(problem);
    const long nq = static_cast<long>(induced_queries.size());
    result.rows.push_back({config.label, dim, Statistic::c, v.c, nq});
    result.rows.push_back({config.label, dim, Statistic::nondegeneracy_rate,
                           v.nondegeneracy_pass_rate, nq});
    result.rows.push_back({config.label, dim, Statistic::cov_sum, v.covariance_sum,
                           static_cast<long>(problem.queries.size())});
    std::ostringstream note;
    note << config.label << ": all_pass=" << (v.all_pass ? "true" : "false");
    if (v.covariance_inconclusive)
      note << " (covariance sum within 1e-6 of zero: inconclusive)";
    note << "\n";
    result.notes += note.str();
  } else {
    std::vector<SparseVector> queries, docs;
    int dim = 0;
    if (config.generator) {
      dim = config.dims.front();
      const int nnz = sparse_nnz_for(*config.generator, dim);
      auto all = gen_sparse_semantic(config.n_queries + config.n_docs, dim, nnz,
                                     config.generator->zipf_s,
                                     parse_sparse_regime(config.regime),
                                     dim_seed(config, dim), config.p);
      queries.assign(all.begin(), all.begin() + config.n_queries);
      docs.assign(all.begin() + config.n_queries, all.end());
    } else {
      queries = read_sparse(config.inputs->queries);
      docs = read_sparse(config.inputs->docs);
      dim = queries.front().dim;
    }
    SparseValidationOptions opts;
    const SparseTheoremConstants v =
        validate_sparse(queries, docs, config.kappa, config.alpha_target,
                        config.rho_target, config.p, opts);
    append_sparse_validation_rows(result.rows, result.notes, config.label, dim, v,
                                  static_cast<int>(docs.size()),
                                  static_cast<int>(queries.size() + docs.size()),
                                  opts.pair_sample);
  }
  return result;
}

// gen / inspect -------------------------------------------------------------------

RunResult run_gen(const ExperimentConfig& config) {
  RunResult result;
  const GeneratorConfig& g = *config.generator;
  if (g.name == "iid_gaussian" || g.name == "clustered" ||
      g.name == "equal_component") {
    if (config.n < 1) throw ConfigError("gen: 'n' must be >= 1");
    const auto vectors =
        make_dense_collection(g, config.n, config.dim, config.seed);
    write_dense(config.out, vectors);
    result.notes = "wrote " + std::to_string(vectors.size()) + " dense vectors to " +
                   config.out + "\n";
  } else if (g.name == "sparse_semantic") {
    if (config.n < 1) throw ConfigError("gen: 'n' must be >= 1");
    const int nnz = sparse_nnz_for(g, config.dim);
    const auto vectors =
        gen_sparse_semantic(config.n, config.dim, nnz, g.zipf_s,
                            parse_sparse_regime(config.regime), config.seed);
    write_sparse(config.out, vectors);
    result.notes = "wrote " + std::to_string(vectors.size()) + " sparse vectors to " +
                   config.out + "\n";
  } else if (g.name == "antipodal") {
    if (config.n_docs < 1 || config.n_queries < 1)
      throw ConfigError("gen: antipodal needs 'n_docs' and 'n_queries'");
    if (config.queries_out.empty())
      throw ConfigError("gen: antipodal needs 'queries_out'");
    const MultiVectorProblem problem =
        gen_antipodal_multivec(config.n_docs, config.n_queries, g.set_size,
                               config.dim, g.noise, config.seed);
    std::vector<std::pair<std::string, VectorSet>> docs, queries;
    for (std::size_t i = 0; i < problem.documents.size(); ++i)
      docs.emplace_back("d" + std::to_string(i), problem.documents[i]);
    for (std::size_t i = 0; i < problem.queries.size(); ++i)
      queries.emplace_back("q" + std::to_string(i), problem.queries[i]);
    write_sets(config.out, docs);
    write_sets(config.queries_out, queries);
    result.notes = "wrote document sets to " + config.out + " and query sets to " +
                   config.queries_out + "\n";
  } else if (g.name == "filtered") {
    if (config.n_docs < 1 || config.n_queries < 1)
      throw ConfigError("gen: filtered needs 'n_docs' and 'n_queries'");
    if (config.queries_out.empty() || config.attrs_out.empty() ||
        config.query_attrs_out.empty())
      throw ConfigError(
          "gen: filtered needs 'queries_out', 'attrs_out' and 'query_attrs_out'");
    const FilteredDataset data = gen_filtered(config.n_docs, config.n_queries,
                                              config.dim, config.p_mismatch,
                                              config.seed);
    std::vector<DenseVector> dv, qv;
    std::map<std::string, AttributeSet> dattrs, qattrs;
    for (std::size_t i = 0; i < data.docs.size(); ++i) {
      dv.push_back(data.docs[i].vector);
      dattrs[std::to_string(i)] = data.docs[i].attrs;
    }
    for (std::size_t i = 0; i < data.queries.size(); ++i) {
      qv.push_back(data.queries[i].vector);
      qattrs[std::to_string(i)] = data.queries[i].attrs;
    }
    write_dense(config.out, dv);
    write_dense(config.queries_out, qv);
    write_attrs(config.attrs_out, dattrs);
    write_attrs(config.query_attrs_out, qattrs);
    result.notes = "wrote filtered dataset (docs/queries/attrs)\n";
  }
  return result;
}

RunResult run_inspect(const ExperimentConfig& config) {
  RunResult result;
  std::ostringstream out;
  if (config.format == "dense") {
    const auto vectors = read_dense(config.path);
    double norm_sum = 0.0;
    for (const auto& v : vectors) norm_sum += v.norm();
    out << config.path << ": dense, count=" << vectors.size()
        << ", dim=" << vectors.front().size()
        << ", mean_l2_norm=" << format_double(norm_sum / vectors.size()) << "\n";
  } else if (config.format == "sparse") {
    const auto vectors = read_sparse(config.path);
    double nnz_sum = 0.0;
    for (const auto& v : vectors) nnz_sum += v.nnz();
    out << config.path << ": sparse, count=" << vectors.size()
        << ", dim=" << vectors.front().dim
        << ", mean_nnz=" << format_double(nnz_sum / vectors.size()) << "\n";
  } else if (config.format == "sets") {
    const auto sets = read_sets(config.path);
    std::size_t total = 0;
    for (const auto& [id, set] : sets) total += set.size();
    out << config.path << ": sets, count=" << sets.size()
        << ", dim=" << sets.front().second.front().size()
        << ", total_vectors=" << total << "\n";
  } else {
    const auto attrs = read_attrs(config.path);
    std::set<std::string> tokens;
    for (const auto& [id, set] : attrs) tokens.insert(set.begin(), set.end());
    out << config.path << ": attrs, count=" << attrs.size()
        << ", distinct_tokens=" << tokens.size() << "\n";
  }
  result.notes = out.str();
  return result;
}

}  // namespace

RunResult run_experiment(const ExperimentConfig& config, bool deterministic) {
  RunResult result;
  if (config.kind == "sweep") result = run_sweep(config);
  else if (config.kind == "multivec") result = run_multivec(config);
  else if (config.kind == "filtered") result = run_filtered(config);
  else if (config.kind == "sparse") result = run_sparse(config);
  else if (config.kind == "recall") result = run_recall(config);
  else if (config.kind == "validate") result = run_validate(config);
  else if (config.kind == "gen") result = run_gen(config);
  else if (config.kind == "inspect") result = run_inspect(config);
  else throw ConfigError("unknown experiment kind '" + config.kind + "'");

  if (config.kind != "gen" && config.kind != "inspect") {
    std::ostringstream csv;
    write_csv(csv, result.rows, deterministic);
    result.csv = csv.str();
    if (!config.out.empty()) {
      std::ofstream file(config.out, std::ios::binary | std::ios::trunc);
      if (!file) throw DataError("cannot open '" + config.out + "' for writing");
      file << result.csv;
      if (!file) throw DataError("failed writing '" + config.out + "'");
    }
  }
  return result;
}

}  // namespace vsl
