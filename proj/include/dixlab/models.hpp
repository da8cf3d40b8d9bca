#pragma once

// Concrete spectral models bundling a singular-value sequence with exact
// zeta and heat evaluators where one exists, plus the glue that runs an
// estimator against a model.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dixlab/estimators.hpp"
#include "dixlab/seq_core.hpp"
#include "dixlab/spectral_models.hpp"

namespace dixlab {

enum class ModelKind { harmonic, oscillator, power_log, torus, nc_torus, matrix, sequence_file };

std::string to_string(ModelKind k);
std::optional<ModelKind> model_kind_from_string(const std::string& name);
std::vector<std::string> model_kind_names();

struct SpectralModel {
  ModelKind kind = ModelKind::harmonic;
  std::string param;                 // short parameter description for report rows
  SingularSequence sequence;
  std::uint64_t max_checkpoint = 0;  // Dixmier horizon
  std::uint64_t min_horizon = 1024;  // shorter Dixmier schedules are Undetermined
  ZetaEvaluator zeta;                // empty: sum over the sequence and its tail
  HeatEvaluator heat;                // empty: heat_trace on the sequence
  double heat_t_max = 1e4;
  std::vector<std::string> notes;
};

/// Riemann zeta for s > 1 by Euler-Maclaurin (16 explicit terms, six
/// Bernoulli corrections).
double riemann_zeta_em(double s);

/// The oscillator profile (2 + sin log log max(u, 3)) / u.
double oscillator_profile(double u);

SpectralModel harmonic_model(std::uint64_t horizon);
SpectralModel oscillator_model(std::uint64_t horizon);
/// C (log n)^b n^{-a}, held at its value at n0 = max(2, ceil(e^{b/a})) for
/// n < n0 when b != 0 so the data is nonincreasing.
SpectralModel power_log_model(double C, double a, double b, std::uint64_t horizon);
SpectralModel torus_model(int n, double cutoff, double power = 0.0,
                          std::size_t budget_mb = kDefaultBudgetMb);
SpectralModel nc_torus_model(double theta, double cutoff, double power = 0.0,
                             std::size_t budget_mb = kDefaultBudgetMb);
/// Singular values of the truncated f (1 + Delta)^{-power}; Dixmier
/// checkpoints limited to dimension / 4.
SpectralModel matrix_model(const FourierMultiplier& f, int n, int M, double power = 0.0,
                           std::size_t budget_mb = kDefaultBudgetMb);
/// Whitespace- or comma-separated values, '#' starts a comment.
SpectralModel sequence_file_model(const std::string& path);

struct MethodOptions {
  std::vector<double> schedule;  // empty: the method's default
  bool extrapolate = true;
  double alpha = 1.0;            // heat exponent
};

TraceEstimate run_method(const SpectralModel& model, Method method,
                         const MethodOptions& options = {},
                         const EstimatorPolicy& policy = {});

MeasurabilityReport measurability_report(
    const SpectralModel& model, const std::vector<std::pair<Method, MethodOptions>>& methods,
    double rel_tol = 1e-2, const EstimatorPolicy& policy = {});

}  // namespace dixlab
