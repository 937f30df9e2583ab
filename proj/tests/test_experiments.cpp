#include <doctest.h>

#include <set>
#include <sstream>
#include <string>

#include "support/test_util.hpp"
#include "vsl/experiments.hpp"
#include "vsl/report.hpp"

using namespace vsl;

TEST_CASE("statistic vocabulary is fixed and collision-free") {
  static const std::set<std::string> published = {
      "relvar", "ratio_median", "ratio_p10", "recall_at_10",
      "c", "nondegeneracy_rate", "cov_sum", "rho",
      "gamma", "pi_hat", "tau", "X",
      "Y", "gap", "relvar_bound", "p_mismatch"};
  std::set<std::string> seen;
  for (Statistic s : kAllStatistics) {
    const std::string name(to_string(s));
    CHECK(published.count(name) == 1);
    CHECK(seen.insert(name).second);
  }
  CHECK(seen.size() == published.size());
}

TEST_CASE("csv writer is RFC-4180 shaped") {
  std::vector<ReportRow> rows;
  rows.push_back({"plain", 16, Statistic::relvar, 0.5, 100});
  rows.push_back({"with,comma \"quoted\"", 32, Statistic::gap, -1.25, 7});
  std::ostringstream out;
  write_csv(out, rows, /*deterministic=*/true);
  const std::string csv = out.str();
  CHECK(csv ==
        "config_label,dimension,statistic,value,n\n"
        "plain,16,relvar,0.5,100\n"
        "\"with,comma \"\"quoted\"\"\",32,gap,-1.25,7\n");

  std::ostringstream stamped;
  write_csv(stamped, rows, /*deterministic=*/false);
  CHECK(stamped.str().rfind("# generated ", 0) == 0);
}

TEST_CASE("config parsing rejects unknown and inconsistent keys") {
  CHECK_THROWS_AS(parse_config_json("not json"), ConfigError);
  CHECK_THROWS_AS(parse_config_json(R"({"kind": "mystery"})"), ConfigError);
  CHECK_THROWS_AS(parse_config_json(R"({"kind": "sweep", "bogus": 1})"), ConfigError);

  const std::string base = R"({
    "kind": "sweep", "label": "x", "seed": 1,
    "dims": [16, 32], "n_docs": 10, "n_queries": 2,
    "generator": {"name": "iid_gaussian"}})";
  CHECK_NOTHROW(parse_config_json(base));

  // generator and inputs are mutually exclusive and one is required.
  CHECK_THROWS_AS(parse_config_json(R"({
    "kind": "sweep", "dims": [16], "n_docs": 10, "n_queries": 2,
    "generator": {"name": "iid_gaussian"},
    "inputs": {"queries": "q.vsd", "docs": "d.vsd"}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_json(R"({"kind": "sweep", "dims": [16]})"),
                  ConfigError);

  // dims must be strictly increasing and nonempty for generated sweeps.
  CHECK_THROWS_AS(parse_config_json(R"({
    "kind": "sweep", "dims": [32, 16], "n_docs": 10, "n_queries": 2,
    "generator": {"name": "iid_gaussian"}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_json(R"({
    "kind": "sweep", "dims": [], "n_docs": 10, "n_queries": 2,
    "generator": {"name": "iid_gaussian"}})"),
                  ConfigError);

  // unknown nested keys are errors too.
  CHECK_THROWS_AS(parse_config_json(R"({
    "kind": "sweep", "dims": [16], "n_docs": 10, "n_queries": 2,
    "generator": {"name": "iid_gaussian", "sigma": 2}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config_json(R"({
    "kind": "sweep", "dims": [16], "n_docs": 10, "n_queries": 2,
    "metric": {"kind": "cosine", "p": 2},
    "generator": {"name": "iid_gaussian"}})"),
                  ConfigError);
}

TEST_CASE("filtered config accepts numeric alpha or the hard-filter token") {
  const std::string finite = R"({
    "kind": "filtered", "dims": [16], "n_docs": 10, "n_queries": 2,
    "generator": {"name": "filtered"}, "alpha": 8.1, "p_mismatch": 0.5})";
  const ExperimentConfig f = parse_config_json(finite);
  CHECK(f.alpha == 8.1);
  CHECK_FALSE(f.alpha_infinite);

  const std::string hard = R"({
    "kind": "filtered", "dims": [16], "n_docs": 10, "n_queries": 2,
    "generator": {"name": "filtered"}, "alpha": "inf", "p_mismatch": 0.5})";
  CHECK(parse_config_json(hard).alpha_infinite);

  CHECK_THROWS_AS(parse_config_json(R"({
    "kind": "filtered", "dims": [16], "n_docs": 10, "n_queries": 2,
    "generator": {"name": "filtered"}, "alpha": "huge", "p_mismatch": 0.5})"),
                  ConfigError);
}

TEST_CASE("recall config pins k to 10") {
  CHECK_THROWS_AS(parse_config_json(R"({
    "kind": "recall", "dims": [16], "n_docs": 100, "n_queries": 5,
    "generator": {"name": "clustered"}, "k": 5})"),
                  ConfigError);
}

TEST_CASE("sweep runs end to end and is byte-deterministic") {
  ExperimentConfig config = parse_config_json(R"({
    "kind": "sweep", "label": "equal-component", "seed": 7,
    "dims": [16, 256, 1024], "n_docs": 400, "n_queries": 40,
    "generator": {"name": "equal_component"}})");

  const RunResult first = run_experiment(config, /*deterministic=*/true);
  const RunResult second = run_experiment(config, /*deterministic=*/true);
  CHECK(first.csv == second.csv);
  REQUIRE(first.rows.size() == 9);  // 3 statistics x 3 dims

  // relvar is dimension-free for this construction.
  double lo = 1e300, hi = 0.0;
  for (const auto& row : first.rows) {
    if (row.statistic != Statistic::relvar) continue;
    lo = std::min(lo, row.value);
    hi = std::max(hi, row.value);
  }
  CHECK(hi / lo < 2.0);
  CHECK(first.notes.find("StableEvidence") != std::string::npos);

  config.threads = 2;
  CHECK(run_experiment(config, true).csv == first.csv);
}

TEST_CASE("sparse run flags the failing regime") {
  const ExperimentConfig config = parse_config_json(R"({
    "kind": "sparse", "label": "neither", "seed": 3,
    "dims": [2048], "n_docs": 300, "n_queries": 30,
    "generator": {"name": "sparse_semantic", "zipf_s": 0.35},
    "regime": "neither", "kappa": 8,
    "alpha_target": 0.83, "rho_target": 0.9, "p": 2})");
  const RunResult result = run_experiment(config, true);
  CHECK(result.notes.find("rho target missed") != std::string::npos);

  bool has_rho = false;
  for (const auto& row : result.rows)
    if (row.statistic == Statistic::rho) has_rho = true;
  CHECK(has_rho);
}

TEST_CASE("validate multivec run reports the three conditions") {
  const ExperimentConfig config = parse_config_json(R"({
    "kind": "validate", "target": "multivec", "label": "antipodal-check",
    "seed": 5, "dims": [64], "n_docs": 60, "n_queries": 12,
    "generator": {"name": "antipodal", "set_size": 3, "noise": 0.1}})");
  const RunResult result = run_experiment(config, true);
  std::set<Statistic> seen;
  for (const auto& row : result.rows) seen.insert(row.statistic);
  CHECK(seen.count(Statistic::c) == 1);
  CHECK(seen.count(Statistic::nondegeneracy_rate) == 1);
  CHECK(seen.count(Statistic::cov_sum) == 1);
  CHECK(result.notes.find("all_pass=true") != std::string::npos);
}

TEST_CASE("gen, inspect and input-driven experiments round trip") {
  vsl_test::TempDir tmp;

  // Antipodal sets -> files -> validation through the inputs path.
  const std::string doc_sets = tmp.file("docs.jsonl");
  const std::string query_sets = tmp.file("queries.jsonl");
  run_experiment(parse_config_json(R"({
    "kind": "gen", "seed": 9, "dim": 32, "n_docs": 40, "n_queries": 8,
    "generator": {"name": "antipodal", "set_size": 3},
    "out": ")" + doc_sets + R"(", "queries_out": ")" + query_sets + R"("})"),
                 true);
  const RunResult sets_info = run_experiment(
      parse_config_json(R"({"kind": "inspect", "path": ")" + doc_sets +
                        R"(", "format": "sets"})"),
      true);
  CHECK(sets_info.notes.find("count=40") != std::string::npos);

  const RunResult validated = run_experiment(parse_config_json(R"({
    "kind": "validate", "target": "multivec", "label": "from-files",
    "metric": {"kind": "cosine"},
    "inputs": {"queries": ")" + query_sets + R"(", "docs": ")" + doc_sets + R"("}})"),
                                             true);
  bool has_c = false;
  for (const auto& row : validated.rows)
    if (row.statistic == Statistic::c) has_c = true;
  CHECK(has_c);

  // Filtered dataset -> dense containers + attribute files -> filtered run.
  const std::string fdocs = tmp.file("fdocs.vsd");
  const std::string fqueries = tmp.file("fqueries.vsd");
  const std::string dattrs = tmp.file("dattrs.jsonl");
  const std::string qattrs = tmp.file("qattrs.jsonl");
  run_experiment(parse_config_json(R"({
    "kind": "gen", "seed": 10, "dim": 16, "n_docs": 60, "n_queries": 10,
    "p_mismatch": 0.5, "generator": {"name": "filtered"},
    "out": ")" + fdocs + R"(", "queries_out": ")" + fqueries +
                                   R"(", "attrs_out": ")" + dattrs +
                                   R"(", "query_attrs_out": ")" + qattrs + R"("})"),
                 true);
  const RunResult filtered = run_experiment(parse_config_json(R"({
    "kind": "filtered", "label": "filtered-files", "alpha": 8.1,
    "inputs": {"queries": ")" + fqueries + R"(", "docs": ")" + fdocs +
                                              R"(", "query_attrs": ")" + qattrs +
                                              R"(", "doc_attrs": ")" + dattrs + R"("}})"),
                                            true);
  bool found_mismatch_rate = false;
  for (const auto& row : filtered.rows) {
    if (row.statistic == Statistic::p_mismatch) {
      found_mismatch_rate = true;
      CHECK(row.value == doctest::Approx(0.5));
    }
  }
  CHECK(found_mismatch_rate);

  // Dense containers also feed an input-driven sweep cell.
  const RunResult swept = run_experiment(parse_config_json(R"({
    "kind": "sweep", "label": "sweep-files",
    "inputs": {"queries": ")" + fqueries + R"(", "docs": ")" + fdocs + R"("}})"),
                                         true);
  REQUIRE(swept.rows.size() == 3);
  CHECK(swept.rows[0].dimension == 16);

  // Sparse vectors -> jsonl -> validation through the inputs path.
  const std::string sp = tmp.file("sparse.jsonl");
  run_experiment(parse_config_json(R"({
    "kind": "gen", "seed": 11, "dim": 1024, "n": 100,
    "generator": {"name": "sparse_semantic"}, "out": ")" + sp + R"("})"),
                 true);
  const RunResult sparse_info = run_experiment(
      parse_config_json(R"({"kind": "inspect", "path": ")" + sp +
                        R"(", "format": "sparse"})"),
      true);
  CHECK(sparse_info.notes.find("count=100") != std::string::npos);
  const RunResult sparse_validated = run_experiment(parse_config_json(R"({
    "kind": "validate", "target": "sparse", "label": "sparse-files",
    "kappa": 8, "alpha_target": 0.83, "rho_target": 0.9, "p": 2,
    "inputs": {"queries": ")" + sp + R"(", "docs": ")" + sp + R"("}})"),
                                                    true);
  bool has_rho = false;
  for (const auto& row : sparse_validated.rows)
    if (row.statistic == Statistic::rho) has_rho = true;
  CHECK(has_rho);
}

TEST_CASE("gen writes dataset files that read back") {
  vsl_test::TempDir tmp;
  const std::string out = tmp.file("docs.vsd");
  ExperimentConfig config = parse_config_json(R"({
    "kind": "gen", "seed": 2, "dim": 8, "n": 25,
    "generator": {"name": "iid_gaussian"}, "out": ")" + out + R"("})");
  run_experiment(config, true);
  // Written through the f32 container, so just check shape on read-back.
  CHECK(parse_config_json(R"({"kind": "inspect", "path": ")" + out +
                          R"(", "format": "dense"})")
            .format == "dense");
  const RunResult inspected = run_experiment(
      parse_config_json(R"({"kind": "inspect", "path": ")" + out +
                        R"(", "format": "dense"})"),
      true);
  CHECK(inspected.notes.find("count=25") != std::string::npos);
  CHECK(inspected.notes.find("dim=8") != std::string::npos);
}
