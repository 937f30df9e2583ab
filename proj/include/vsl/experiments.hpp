#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vsl/report.hpp"
#include "vsl/vectors.hpp"

namespace vsl {

struct GeneratorConfig {
  std::string name;  // iid_gaussian | clustered | equal_component |
                     // antipodal | filtered | sparse_semantic
  int n_clusters = 5;
  double spread = 0.3;
  int set_size = 4;
  double noise = 0.1;
  int nnz = 0;  // 0 = rule max(64, dim/16), capped at dim
  double zipf_s = 1.1;
};

struct InputsConfig {
  std::string queries;
  std::string docs;
  std::string query_attrs;
  std::string doc_attrs;
};

struct IndexConfig {
  int nlist = 0;    // 0 = round(sqrt(n_docs))
  int nprobes = 0;  // 0 = max(1, round(sqrt(n_docs) / 4))
  int M = 16;
  int ef_construction = 200;
  int ef_search = 200;
};

// Mirrors the JSON config document field-for-field; unknown keys are
// rejected at parse time.
struct ExperimentConfig {
  std::string kind;  // sweep | multivec | filtered | sparse | recall |
                     // validate | gen | inspect
  std::string label;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string out;

  std::vector<int> dims;
  int n_docs = 0;
  int n_queries = 0;
  Metric metric = Metric::lp(2.0);

  std::optional<GeneratorConfig> generator;
  std::optional<InputsConfig> inputs;

  // multivec
  std::string agg = "chamfer";

  // filtered
  double alpha = 0.0;
  bool alpha_infinite = false;
  double p_mismatch = 0.5;

  // sparse
  std::string regime = "coi_and_overlap";
  int kappa = 8;
  double alpha_target = 0.83;
  double rho_target = 0.9;
  double p = 2.0;

  // recall
  IndexConfig index;
  int k = 10;

  // validate
  std::string target;  // multivec | sparse

  // gen
  int n = 0;
  int dim = 0;
  std::string queries_out;
  std::string attrs_out;
  std::string query_attrs_out;

  // inspect
  std::string path;
  std::string format;  // dense | sparse | sets | attrs
};

// Parses and validates a config document; unknown keys, missing required
// fields, and inconsistent combinations raise ConfigError.
ExperimentConfig parse_config_json(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct RunResult {
  std::vector<ReportRow> rows;
  std::string csv;    // rendered bytes, also written to config.out when set
  std::string notes;  // human-readable summary (verdicts, validator flags)
};

// Executes the configured pipeline deterministically and renders the CSV.
RunResult run_experiment(const ExperimentConfig& config, bool deterministic);

}  // namespace vsl
