#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <string>

#include "vsl/errors.hpp"
#include "vsl/experiments.hpp"

namespace {

constexpr int kExitConfigError = 2;
constexpr int kExitDataError = 3;
constexpr int kExitInternalError = 4;

void print_error(int code, const std::string& message) {
  // Machine-readable diagnostics on stderr.
  std::string escaped;
  for (char c : message) {
    if (c == '"' || c == '\\') escaped += '\\';
    if (c == '\n') {
      escaped += "\\n";
      continue;
    }
    escaped += c;
  }
  std::cerr << "{\"error\":{\"code\":" << code << ",\"message\":\"" << escaped
            << "\"}}\n";
}

struct CommonOptions {
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::string out;
  bool deterministic = false;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
  cmd->add_option("--config", opts.config_path, "JSON experiment config")->required();
  cmd->add_option("--seed", opts.seed, "Override the config seed")
      ->each([&opts](const std::string&) { opts.seed_set = true; });
  cmd->add_option("--out", opts.out, "Override the config output path");
  cmd->add_flag("--deterministic", opts.deterministic,
                "Suppress the timestamp header line in CSV output");
  cmd->add_option("--threads", opts.threads, "Override the config thread count");
}

int run_subcommand(const std::string& kind, const CommonOptions& opts) {
  vsl::ExperimentConfig config = vsl::load_config(opts.config_path);
  if (config.kind != kind)
    throw vsl::ConfigError("config kind '" + config.kind +
                           "' does not match subcommand '" + kind + "'");
  if (opts.seed_set) config.seed = opts.seed;
  if (!opts.out.empty()) config.out = opts.out;
  if (opts.threads > 0) config.threads = opts.threads;

  const vsl::RunResult result = vsl::run_experiment(config, opts.deterministic);
  if (!result.notes.empty()) std::cout << result.notes;
  if (!config.out.empty() && !result.csv.empty())
    std::cout << "wrote " << result.rows.size() << " rows to " << config.out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"vsl: stability diagnostics and recall experiments for vector search"};
  app.require_subcommand(1);

  const std::vector<std::string> kinds = {"gen",    "sweep",  "multivec", "filtered",
                                          "sparse", "recall", "validate", "inspect"};
  std::vector<CommonOptions> options(kinds.size());
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(kinds[i]);
    add_common(cmd, options[i]);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < kinds.size(); ++i) {
      if (app.got_subcommand(kinds[i])) return run_subcommand(kinds[i], options[i]);
    }
    print_error(kExitConfigError, "no subcommand given");
    return kExitConfigError;
  } catch (const vsl::ConfigError& e) {
    print_error(kExitConfigError, e.what());
    return kExitConfigError;
  } catch (const vsl::DataError& e) {
    print_error(kExitDataError, e.what());
    return kExitDataError;
  } catch (const std::invalid_argument& e) {
    print_error(kExitDataError, e.what());
    return kExitDataError;
  } catch (const std::exception& e) {
    print_error(kExitInternalError, e.what());
    return kExitInternalError;
  }
}
