#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dixlab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Neumaier-compensated accumulator. Terms are consumed strictly left to
/// right so a given input order always produces the same bits.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

struct Tolerances {
  double conv = 1e-2;       // convergence (total variation of extrapolants)
  double osc = 5e-2;        // oscillation detection
  double exact_rel = 1e-12; // comparisons of exactly computable quantities
};

/// k = 2^first, 2^(first+1), ... <= max_index.
std::vector<std::uint64_t> dyadic_schedule(std::uint64_t max_index,
                                           unsigned first_exponent = 1);

/// start, start*ratio, ... with the last node clamped to stop.
std::vector<double> geometric_grid(double start, double stop, double ratio);

struct LineFit {
  double intercept = 0.0;
  double slope = 0.0;
  double max_residual = 0.0;
};

/// Ordinary least squares y ~ intercept + slope*x.
LineFit fit_line(std::span<const double> x, std::span<const double> y);

/// Convergence diagnostics for a series y_i sampled at asymptotic
/// coordinates x_i -> 0 (x = 1/log k, 1/k, 1/t ...). The model is
/// y ~ limit + b*x.
struct SeriesDiagnostics {
  bool usable = false;
  double limit = 0.0;        // intercept of the fit over the last fit_points
  double error = 0.0;        // window shift + fit residual + |quadratic - linear intercept|
  double amplitude = 0.0;    // total variation of two-point extrapolants, last third
  double band_lo = 0.0;      // min of raw values over the whole series
  double band_hi = 0.0;      // max of raw values over the whole series
  double tail_range = 0.0;   // raw max - min over the last third
};

SeriesDiagnostics analyse_series(std::span<const double> x,
                                 std::span<const double> y,
                                 std::size_t fit_points = 6);

/// Counter-based generator: draw i depends only on (seed, i).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t bits(std::uint64_t counter) const;
  double uniform(std::uint64_t counter) const;  // [0, 1)
  double uniform(std::uint64_t counter, double lo, double hi) const {
    return lo + (hi - lo) * uniform(counter);
  }
  /// Sequential convenience wrapper.
  std::uint64_t next_bits() { return bits(counter_++); }
  double next_uniform() { return uniform(counter_++); }
  double next_uniform(double lo, double hi) { return uniform(counter_++, lo, hi); }
  std::uint64_t next_index(std::uint64_t n) { return next_bits() % n; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// printf("%.12g") formatting used by every report writer.
std::string format_g12(double x);

}  // namespace dixlab
