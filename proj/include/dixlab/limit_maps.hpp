#pragma once

// Map algebra on sequences and bounded functions: shifts, dilations, powers,
// Cesaro means, the exponential reparametrization L^{-1} and its conjugation,
// the embeddings p / p_c, restriction r, unit-window averaging E, and the
// numerical tests built on them (commutator defects, oscillation K(s),
// almost convergence).

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dixlab/numeric.hpp"

namespace dixlab {

enum class PieceKind { step, linear };

/// Bounded function on [domain_start, inf) given by pieces on
/// [b_i, b_{i+1}). Step pieces are right-continuous constants; linear pieces
/// interpolate (b_i, v_i) -> (b_{i+1}, v_{i+1}). The last value is held
/// constant up to the horizon; past the horizon the function equals
/// tail_value. The first breakpoint is the domain start.
class PiecewiseFunction {
 public:
  PiecewiseFunction(PieceKind kind, std::vector<double> breakpoints, std::vector<double> values,
                    double horizon, double tail_value = 0.0);

  PieceKind kind() const { return kind_; }
  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }
  double domain_start() const { return breakpoints_.front(); }
  double horizon() const { return horizon_; }
  double tail_value() const { return tail_value_; }
  /// Ratio of the geometric grid used when this function was produced by a
  /// non-affine resampling; 0 for exact representations.
  double resample_ratio() const { return resample_ratio_; }

  /// True when evaluation at t falls back on the tail value.
  bool beyond_horizon(double t) const;
  double operator()(double t) const;
  /// Left limit f(t^-), t > domain_start.
  double left_limit(double t) const;
  /// Exact integral over [a, b], a >= domain_start.
  double integral(double a, double b) const;
  /// sup |f| over [domain_start, horizon] together with the tail value.
  double sup_norm() const;

  PiecewiseFunction with_resample_ratio(double ratio) const;

 private:
  std::size_t piece_index(double t) const;  // largest i with b_i <= t
  double piece_value(std::size_t i, double t) const;
  double piece_integral(std::size_t i, double a, double b) const;

  PieceKind kind_;
  std::vector<double> breakpoints_;
  std::vector<double> values_;
  double horizon_;
  double tail_value_;
  double resample_ratio_ = 0.0;
};

/// Default geometric resampling ratio for non-affine reparametrizations.
inline constexpr double kResampleRatio = 1.05;

// Discrete maps on finite sequences (element 0 is the first term).
std::vector<double> shift_discrete(std::span<const double> x, std::uint64_t j);
std::vector<double> dilate_discrete(std::span<const double> x, std::uint64_t j);
std::vector<double> cesaro_discrete(std::span<const double> x);

// Continuous maps.
PiecewiseFunction shift_cont(const PiecewiseFunction& f, double a);   // f(t + a)
PiecewiseFunction dilate_cont(const PiecewiseFunction& f, double a);  // f(t / a)
PiecewiseFunction power_cont(const PiecewiseFunction& f, double a,
                             double ratio = kResampleRatio);          // f(t^a)
/// (1/t) int_0^t f at t > 0 (f(0) at t = 0), integrated exactly.
double cesaro_at(const PiecewiseFunction& f, double t);
/// Linear interpolant of the Cesaro mean through exact node values.
PiecewiseFunction cesaro_cont(const PiecewiseFunction& f, double ratio = kResampleRatio);

/// L^{-1}: g on [1, inf) -> g(e^t) on [0, inf).
PiecewiseFunction exp_conjugate(const PiecewiseFunction& g, double ratio = kResampleRatio);
/// L: f on [0, inf) -> f(log t) on [1, inf).
PiecewiseFunction log_conjugate(const PiecewiseFunction& f, double ratio = kResampleRatio);

using FunctionMap = std::function<PiecewiseFunction(const PiecewiseFunction&)>;
/// L(G) = L o G o L^{-1}.
FunctionMap conjugate(FunctionMap g, double ratio = kResampleRatio);

// Appendix-style embeddings (sequences indexed from 0).
PiecewiseFunction floor_embed(std::span<const double> x);   // p
PiecewiseFunction linear_embed(std::span<const double> x);  // p_c
std::vector<double> restrict_to_integers(const PiecewiseFunction& f);  // r
/// E(f)(t) = int_t^{t+1} f; exact nodes at breakpoints and breakpoints - 1.
PiecewiseFunction window_avg(const PiecewiseFunction& f);
double window_avg_at(const PiecewiseFunction& f, double t);
/// r o E, each entry an exact unit-window integral.
std::vector<double> restrict_window_avg(const PiecewiseFunction& f);

enum class DefectPair {
  shift_floor,     // (T_j, p)
  shift_linear,    // (T_j, p_c)
  cesaro_floor,    // (C, p)
  cesaro_linear,   // (C, p_c)
  shift_window,    // (T_j, rE)
  cesaro_window,   // (C, rE)
};

/// |(G o H - H o G)(a)(t)| for the embedding pairs.
double commutator_defect(DefectPair pair, std::span<const double> a, double t,
                         std::uint64_t j = 1);
/// |(G o rE - rE o G)(f)(n)| for the window pairs, n = floor(t).
double commutator_defect(DefectPair pair, const PiecewiseFunction& f, double t,
                         std::uint64_t j = 1);

/// K(s) = sup_{t in [s, s+1)} |f(t) - f(s)|.
double oscillation_K(const PiecewiseFunction& f, double s);
/// Tabulates K on [start, end] at the given spacing as a linear function.
PiecewiseFunction oscillation_profile(const PiecewiseFunction& f, double start, double end,
                                      double spacing);

struct AlmostConvergenceResult {
  bool passed = false;
  std::vector<double> windows;
  std::vector<double> window_sups;  // sup_t (1/W) int_t^{t+W} f per window
};

AlmostConvergenceResult almost_convergence_test(const PiecewiseFunction& f,
                                                std::span<const double> windows,
                                                double tolerance = 1e-2);

}  // namespace dixlab
