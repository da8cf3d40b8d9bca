#pragma once

// Three measurements of the logarithmic divergence of a trace (Dixmier
// log-average, zeta residue, heat functional), the cross-method
// measurability report, exact product traces on the torus, and the Hoelder
// and Mellin numerical checks.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "dixlab/seq_core.hpp"
#include "dixlab/spectral_models.hpp"

namespace dixlab {

enum class Method { dixmier_alpha, zeta_residue, heat_raw, heat_cesaro };
enum class EstimateStatus { Converged, Oscillating, Undetermined };
enum class Verdict { Measurable, NotMeasurable, Undetermined };

std::string to_string(Method m);
std::string to_string(EstimateStatus s);
std::string to_string(Verdict v);
std::optional<Method> method_from_string(const std::string& name);

struct SeriesPoint {
  double checkpoint = 0.0;
  double value = 0.0;
};

/// One method's reading. Converged: value is the extrapolated (or last raw)
/// limit. Oscillating: value is the midpoint of [band_lo, band_hi], the raw
/// range over the whole schedule. Undetermined: value is NaN.
struct TraceEstimate {
  Method method = Method::dixmier_alpha;
  double value = 0.0;
  std::vector<SeriesPoint> raw_series;
  bool extrapolated = false;
  double oscillation = 0.0;  // variation of two-point extrapolants, trailing third
  EstimateStatus status = EstimateStatus::Undetermined;
  double error = 0.0;        // extrapolation error estimate (Converged only)
  double band_lo = 0.0;
  double band_hi = 0.0;
  std::string notes;
};

struct EstimatorPolicy {
  Tolerances tol;
  std::size_t fit_points = 6;
  std::uint64_t min_horizon = 1024;  // Dixmier needs at least 2^10 terms
  double quadrature_tol = 1e-6;      // relative, Cesaro heat quadrature
};

/// s -> zeta(s) for s > 1.
using ZetaEvaluator = std::function<double(double)>;
/// (t, alpha) -> g(t) = (1/t) sum exp(-(t mu_n)^{-alpha}), unnormalized.
using HeatEvaluator = std::function<double(double, double)>;

/// Classifies a scheduled series against an extrapolation coordinate x
/// (x -> 0 at the limit).
TraceEstimate classify_series(Method method, std::span<const double> checkpoints,
                              std::span<const double> values, std::span<const double> coord,
                              bool extrapolate, const EstimatorPolicy& policy);

/// alpha over the schedule (default: dyadic up to the explicit length);
/// extrapolation fits a + b / log(1 + N).
TraceEstimate dixmier_estimate(const SingularSequence& x,
                               std::span<const std::uint64_t> schedule = {},
                               bool extrapolate = true, const EstimatorPolicy& policy = {});

/// k = 10, 20, ..., 200.
std::vector<double> default_zeta_schedule();

/// (1/k) zeta(1 + 1/k) over the schedule, extrapolated linearly in 1/k.
TraceEstimate zeta_residue_estimate(const ZetaEvaluator& zeta,
                                    std::span<const double> k_schedule = {},
                                    bool extrapolate = true, const EstimatorPolicy& policy = {});
/// Sequence route: sum mu^s plus the tail model; without a tail each
/// scheduled s must pass the head-domination test, else Undetermined.
TraceEstimate zeta_residue_estimate(const SingularSequence& x,
                                    std::span<const double> k_schedule = {},
                                    bool extrapolate = true, const EstimatorPolicy& policy = {});

/// limsup over the trailing half of the schedule of
/// (1/k) zeta(1 + 1/k)^{k/(k+1)}, from an exact evaluator.
double zeta_norm_z1(const ZetaEvaluator& zeta, std::span<const double> k_schedule);

/// (1/t) sum exp(-(t mu_n)^{-alpha}); terms below 1e-18 of the running total
/// end the sum, and the tail model is integrated when reached.
double heat_trace(const SingularSequence& x, double t, double alpha_exp);

enum class HeatSmoothing { raw, cesaro };

/// t = 10^2 .. t_max on a geometric grid with three points per decade.
std::vector<double> default_heat_schedule(double t_max = 1e4);

/// Normalized by Gamma(1/alpha + 1). raw: g(t), extrapolated in 1/t.
/// cesaro: (1/log t) int_1^t g(s) ds/s, Romberg on trapezoid sums in log s
/// over a geometric grid (ratio 1.1, refined twice); Undetermined when the
/// Romberg error estimate exceeds quadrature_tol. Extrapolated in 1/log t.
TraceEstimate heat_estimate(const HeatEvaluator& heat, std::span<const double> t_schedule,
                            double alpha_exp, HeatSmoothing smoothing, bool extrapolate = true,
                            const EstimatorPolicy& policy = {});

struct MeasurabilityReport {
  std::vector<TraceEstimate> estimates;
  double max_pairwise_discrepancy = 0.0;
  Verdict verdict = Verdict::Undetermined;
  std::string notes;
};

/// Measurable iff every estimate converged and all pairwise discrepancies are
/// within rel_tol * max(1, |value|); NotMeasurable iff some estimate
/// oscillates with amplitude above the oscillation tolerance.
MeasurabilityReport measurability_report(std::vector<TraceEstimate> estimates,
                                         double rel_tol = 1e-2,
                                         const EstimatorPolicy& policy = {});

/// Orthogonal projection onto the sublattice (stride Z)^n, diagonal in e_m.
struct SublatticeProjection {
  int stride = 2;
};
using ProductOperand = std::variant<FourierMultiplier, SublatticeProjection, Eigen::MatrixXcd>;

/// (1/k) Tr(A T^{1+1/k}) for T = (1 + Delta)^{-power} on the torus given by
/// the shells; exact diagonal formulas only.
TraceEstimate product_zeta_sequence(const ProductOperand& A, const LatticeShells& shells,
                                    double power, std::span<const double> k_schedule = {},
                                    const EstimatorPolicy& policy = {});

/// Elementwise product of two diagonal sequences in a common basis; tails
/// combine when both are present.
SingularSequence diagonal_product(const SingularSequence& x, const SingularSequence& y);
/// mu_n^p, with the tail raised accordingly.
SingularSequence diagonal_power(const SingularSequence& x, double p);

enum class HolderMode { converged, per_checkpoint };

struct HolderResult {
  std::optional<bool> holds;  // empty when Undetermined
  double slack = 0.0;         // rhs - lhs (worst case over checkpoints)
  HolderMode mode = HolderMode::converged;
  std::string notes;
};

/// Tr(|TV|) <= Tr(T^p)^{1/p} Tr(V^q)^{1/q} with C_p = 1 for commuting
/// diagonal T, V. Uses extrapolated values when all three Dixmier estimates
/// converge, else compares alpha at every common checkpoint. No verdict when
/// the scheduled data is too short or non-finite.
HolderResult holder_check(const SingularSequence& t, const SingularSequence& v, double p,
                          std::span<const std::uint64_t> schedule = {},
                          const EstimatorPolicy& policy = {});

/// Q with eigenvalues lambda_n: heat trace Tr e^{-tQ} and zeta Tr Q^{-s}
/// must be Mellin pairs (including any tail corrections).
struct MellinModel {
  std::string name;
  std::function<double(double)> heat;  // t -> Tr e^{-tQ}
  std::function<double(double)> zeta;  // s -> Tr Q^{-s}
  double lambda_min = 1.0;             // smallest eigenvalue
  double small_t_order = 0.0;          // Tr e^{-tQ} ~ t^{-d} as t -> 0
};

MellinModel mellin_single(double lambda);
/// lambda_n = n^2, n = 1..N, with the integral tail from N + 1/2.
MellinModel mellin_squares(std::uint64_t N);
/// lambda_m = 1 + |m|^2 on Z^2 within the shells, tail from the midpoint radius.
MellinModel mellin_torus(const LatticeShells& shells);

struct MellinResult {
  std::optional<bool> passed;  // empty when the quadrature did not settle
  double integral = 0.0;
  double expected = 0.0;       // Gamma(s) zeta(s)
  double relative_error = 0.0;
  double quadrature_error = 0.0;
};

/// int_0^inf t^{s-1} Tr e^{-tQ} dt by the trapezoid rule in u = log t,
/// halving the step until successive values agree.
MellinResult mellin_check(const MellinModel& model, double s, double rel_tol = 1e-6);

}  // namespace dixlab
