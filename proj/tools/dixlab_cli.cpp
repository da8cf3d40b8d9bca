// dixlab: run a trace-estimation experiment described by a JSON config.
//
// Exit codes: 0 ok, 2 some estimate Undetermined or truncated by the budget,
// 3 an invariant failed (--check), 4 bad config or runtime error.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dixlab/harness.hpp"

namespace {

constexpr int kConfigError = 4;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw dixlab::Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical Dixmier trace and spectral zeta/heat estimators"};
  std::string config_path;
  std::string out_path;
  std::string format;
  std::uint64_t seed = 0;
  unsigned threads = 1;
  bool list_models = false;
  bool check = false;
  app.add_option("--config", config_path, "Experiment config (JSON)");
  app.add_option("--out", out_path, "Write the report here instead of stdout");
  app.add_option("--format", format, "Report format, overrides the config")
      ->check(CLI::IsMember({"csv", "json"}));
  auto* seed_opt = app.add_option("--seed", seed, "Seed, overrides the config");
  app.add_option("--threads", threads, "Estimator worker threads")->check(CLI::Range(1u, 256u));
  app.add_flag("--list-models", list_models, "Print the model kinds and exit");
  app.add_flag("--check", check, "Run the invariant suite on the configured model");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigError;
  }

  if (list_models) {
    for (const auto& name : dixlab::model_kind_names()) std::cout << name << '\n';
    return 0;
  }
  if (config_path.empty()) {
    std::cerr << "error: --config is required\n";
    return kConfigError;
  }

  std::string text;
  try {
    text = read_file(config_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }
  auto parsed = dixlab::parse_config(text);
  if (!parsed.config) {
    for (const auto& err : parsed.errors) std::cerr << config_path << ": " << err << '\n';
    return kConfigError;
  }
  auto config = std::move(*parsed.config);
  if (!format.empty()) config.format = format;
  if (seed_opt->count() > 0) config.seed = seed;

  dixlab::RunReport report;
  try {
    report = check ? dixlab::run_invariant_suite(config) : dixlab::run_experiment(config, threads);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  }

  const std::string body = dixlab::emit_report(report, config.format);
  if (out_path.empty()) {
    std::cout << body;
  } else {
    std::ofstream out(out_path, std::ios::binary);
    out << body;
    if (!out) {
      std::cerr << "error: cannot write '" << out_path << "'\n";
      return kConfigError;
    }
  }
  std::fprintf(stderr, "wall %.3f s, peak rss %.1f MB%s\n", report.wall_seconds,
               report.peak_rss_mb, report.truncated ? ", truncated by budget" : "");
  return dixlab::exit_code(report);
}
