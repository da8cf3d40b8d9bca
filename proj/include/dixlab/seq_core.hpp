#pragma once

// Sequence-space foundation: singular-value sequences, logarithmic averages,
// the M_{1,inf} norm, submajorization, ideal membership predicates, the
// Tauberian classification and the polarization sequence ~mu.

#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dixlab/numeric.hpp"

namespace dixlab {

/// mu_n ~ C (log n)^b n^{-a} for indices past the explicit data.
struct PowerLogTail {
  double C = 1.0;
  double a = 1.0;
  double b = 0.0;

  double operator()(double n) const;
  /// sum_{n=first}^{last} tail(n); direct for short ranges, otherwise the
  /// midpoint integral over [first - 1/2, last + 1/2].
  double partial_sum(std::uint64_t first, std::uint64_t last) const;
  /// sum_{n >= first} tail(n)^s, +inf when divergent (a*s <= 1).
  double power_sum(std::uint64_t first, double s) const;
};

/// Finite nonincreasing nonnegative sequence {mu_n}, n = 1..length, with an
/// optional asymptotic tail. Immutable once constructed.
class SingularSequence {
 public:
  SingularSequence() = default;

  /// Validates ordering, sign, finiteness and the tail junction.
  static SingularSequence from_sorted(std::vector<double> values,
                                      std::optional<PowerLogTail> tail = std::nullopt);

  std::span<const double> values() const { return values_; }
  std::size_t length() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  const std::optional<PowerLogTail>& tail() const { return tail_; }

  /// 1-based mu_n: explicit data, then the tail, then zero.
  double operator[](std::uint64_t n) const;

  /// True when the data certifies finite support: no tail model and the
  /// last explicit value is zero (or the sequence is empty).
  bool finitely_supported() const;

  SingularSequence scaled(double c) const;

 private:
  std::vector<double> values_;
  std::optional<PowerLogTail> tail_;
};

struct LogAverageSeries {
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> alphas;
};

enum class Membership { Member, NonMember, Undetermined };
enum class TauberianStatus { Tauberian, NonTauberian, Undetermined };

std::string to_string(Membership m);
std::string to_string(TauberianStatus s);

struct SequencePolicy {
  Tolerances tol;
  std::uint64_t min_length = 1024;   // asymptotic predicates need at least this much data
  std::size_t fit_points = 6;        // extrapolation window (checkpoints)
  double slope_tol = 0.25;           // trailing-window regression tolerance
  std::uint64_t horizon = 0;         // 0: use the explicit length
};

struct WeakLpMembership {
  double p = 1.0;
  Membership member = Membership::Undetermined;
};

struct IdealMembershipReport {
  double norm_1_inf = 0.0;
  Membership in_m1inf = Membership::Undetermined;
  Membership in_weak_l1 = Membership::Undetermined;
  double weak_l1_witness = 0.0;    // limsup n mu_n
  Membership in_u1inf = Membership::Undetermined;
  double u1inf_witness = 0.0;      // limsup n mu_n / log n
  std::vector<WeakLpMembership> in_weak_lp;
  double riesz_proxy = 0.0;        // labelled proxy: trailing max of alpha
  double z1_norm = 0.0;
  bool from_tail_model = false;
  std::uint64_t window_begin = 0;  // trailing window, when no tail model
  std::uint64_t window_end = 0;
  double window_slope = 0.0;       // slope of log(n mu_n) against log n
  std::string notes;
};

struct TauberianVerdict {
  TauberianStatus status = TauberianStatus::Undetermined;
  double limit_estimate = 0.0;        // valid iff Tauberian
  double limit_error = 0.0;
  double oscillation_amplitude = 0.0; // TV of two-point extrapolants, last third
  double band_width = 0.0;            // raw max - min of alpha over all checkpoints
  LogAverageSeries series;
  std::string diagnostics;
};

SingularSequence decreasing_rearrangement(std::span<const double> x);
SingularSequence decreasing_rearrangement(std::span<const std::complex<double>> x);

/// alpha_k = (sum_{n<=k} mu_n) / log(1+k) at increasing checkpoints.
LogAverageSeries log_average(const SingularSequence& x, std::span<const std::uint64_t> ks);

/// sup_k alpha_k over the explicit data and, when a tail model is present,
/// over its analytic extension (including the limit k -> inf).
double norm_1_inf(const SingularSequence& x);

/// True iff every partial sum of y is dominated by the matching partial sum
/// of x (shorter sequence zero-padded).
bool submajorizes(const SingularSequence& x, const SingularSequence& y,
                  double rel_tol = 1e-12);

IdealMembershipReport ideal_membership(const SingularSequence& x,
                                       std::span<const double> ps,
                                       const SequencePolicy& policy = {});

TauberianVerdict tauberian_classify(const SingularSequence& x,
                                    const SequencePolicy& policy = {});

/// ~mu_k = mu_k(T1) - mu_k(T2) + i mu_k(T3) - i mu_k(T4).
std::vector<std::complex<double>> tilde_mu(const SingularSequence& t1,
                                           const SingularSequence& t2,
                                           const SingularSequence& t3,
                                           const SingularSequence& t4);

/// Max of alpha over the last half of the dyadic checkpoints: a computable
/// stand-in for limsup alpha. Zero for certified finite support.
double riesz_seminorm_proxy(const SingularSequence& x, const SequencePolicy& policy = {});

/// zeta_x(s) = sum mu_n^s with the tail model's contribution. Throws when the
/// tail makes the sum divergent at s.
double sequence_zeta(const SingularSequence& x, double s);

/// Estimated relative weight of the unseen tail of a sequence without a tail
/// model, assuming mu_n <= mu_L L / n beyond the data.
double head_domination_ratio(const SingularSequence& x, double s);

/// limsup over the trailing half of the schedule of
/// (1/k) * (sum mu_n^{1+1/k})^{k/(k+1)}. NaN when no scheduled k is usable.
double zeta_norm_z1(const SingularSequence& x, std::span<const double> k_schedule);

/// Default k schedule for zeta_norm_z1: k = 2^1 .. 2^20.
std::vector<double> default_z1_schedule();

}  // namespace dixlab
