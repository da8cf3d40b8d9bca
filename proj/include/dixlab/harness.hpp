#pragma once

// Experiment plumbing: versioned JSON configs, model + estimator pipelines,
// CSV/JSON reports and the invariant suite behind `--check`.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dixlab/estimators.hpp"
#include "dixlab/models.hpp"

namespace dixlab {

inline constexpr int kSchemaVersion = 1;

struct CoefficientSpec {
  std::vector<int> m;
  double re = 0.0;
  double im = 0.0;
  bool operator==(const CoefficientSpec&) const = default;
};

struct ModelSpec {
  ModelKind kind = ModelKind::harmonic;
  std::uint64_t horizon = 0;          // harmonic, oscillator, power_log
  double C = 1.0, a = 1.0, b = 0.0;   // power_log
  int n = 2;                          // torus, matrix
  double cutoff = 0.0;                // torus, nc_torus
  double power = 0.0;                 // torus, nc_torus, matrix (0: n/2)
  double theta = 0.0;                 // nc_torus
  int M = 0;                          // matrix
  std::vector<CoefficientSpec> f;     // matrix
  std::string path;                   // sequence_file
  bool operator==(const ModelSpec&) const = default;
};

struct EstimatorSpec {
  Method method = Method::dixmier_alpha;
  std::vector<double> schedule;
  bool extrapolate = true;
  double alpha = 1.0;
  bool operator==(const EstimatorSpec&) const = default;
};

struct ExperimentConfig {
  int schema_version = kSchemaVersion;
  std::string name;
  ModelSpec model;
  std::vector<EstimatorSpec> estimators;
  double conv = 1e-2;
  double osc = 5e-2;
  double measurability = 1e-2;  // relative pairwise tolerance
  std::string format = "csv";
  std::uint64_t seed = 0;
  std::uint64_t memory_mb = kDefaultBudgetMb;
  std::uint64_t max_horizon = std::uint64_t{1} << 27;
  bool operator==(const ExperimentConfig&) const = default;
};

/// Either a validated config or every schema violation, each prefixed with
/// its path (e.g. "model.cutoff: must be >= 1").
struct ParseResult {
  std::optional<ExperimentConfig> config;
  std::vector<std::string> errors;
};

ParseResult parse_config(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

struct ReportRow {
  std::string method;
  std::string model;
  std::string param;
  double value = 0.0;
  std::string status;
  double oscillation = 0.0;
  bool extrapolated = false;
  std::string notes;
  bool operator==(const ReportRow&) const = default;
};

struct RunReport {
  std::string name;
  std::uint64_t seed = 0;
  std::vector<ReportRow> rows;
  bool truncated = false;
  bool invariant_failure = false;
  // Not serialized: kept out of the report so identical runs are byte-identical.
  double wall_seconds = 0.0;
  double peak_rss_mb = 0.0;
};

/// Memory budget in MB: the config value, capped by DIXLAB_BUDGET_MB when set.
std::uint64_t effective_budget_mb(const ExperimentConfig& config);

SpectralModel build_model(const ModelSpec& spec, std::uint64_t budget_mb);

/// Rows in config order; with >= 2 estimators a final "measurability" row.
/// threads > 1 evaluates estimators concurrently without changing the output.
RunReport run_experiment(const ExperimentConfig& config, unsigned threads = 1);

/// Property checks on the configured model plus seeded random vectors; one
/// row per invariant with status "pass" or "fail".
RunReport run_invariant_suite(const ExperimentConfig& config);

std::string emit_report(const RunReport& report, const std::string& format);
/// Inverse of emit_report(report, "json") for the serialized fields.
RunReport parse_report_json(const std::string& text);

/// Random nonincreasing sequence rescaled so that norm_1_inf is 1 (up to rounding
/// from below).
SingularSequence random_unit_m1inf(CounterRng& rng, std::size_t max_length);

/// 0 all converged or passed, 2 some Undetermined or truncated, 3 an invariant failed.
int exit_code(const RunReport& report);

}  // namespace dixlab
