#include "dixlab/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <Eigen/QR>

namespace dixlab {

std::vector<std::uint64_t> dyadic_schedule(std::uint64_t max_index,
                                           unsigned first_exponent) {
  std::vector<std::uint64_t> ks;
  for (unsigned j = first_exponent; j < 64; ++j) {
    const std::uint64_t k = std::uint64_t{1} << j;
    if (k > max_index) break;
    ks.push_back(k);
  }
  return ks;
}

std::vector<double> geometric_grid(double start, double stop, double ratio) {
  if (!(start > 0.0) || !(ratio > 1.0) || stop < start) {
    throw Error("geometric_grid: need 0 < start <= stop and ratio > 1");
  }
  std::vector<double> grid;
  for (std::size_t i = 0;; ++i) {
    const double t = start * std::pow(ratio, static_cast<double>(i));
    if (t >= stop * (1.0 - 1e-14)) {
      grid.push_back(stop);
      break;
    }
    grid.push_back(t);
  }
  return grid;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n != y.size() || n == 0) throw Error("fit_line: size mismatch or empty input");
  LineFit fit;
  if (n == 1) {
    fit.intercept = y[0];
    return fit;
  }
  CompensatedSum sx, sy;
  for (std::size_t i = 0; i < n; ++i) {
    sx.add(x[i]);
    sy.add(y[i]);
  }
  const double mx = sx.value() / static_cast<double>(n);
  const double my = sy.value() / static_cast<double>(n);
  CompensatedSum sxx, sxy;
  for (std::size_t i = 0; i < n; ++i) {
    sxx.add((x[i] - mx) * (x[i] - mx));
    sxy.add((x[i] - mx) * (y[i] - my));
  }
  if (sxx.value() == 0.0) {
    fit.intercept = my;
  } else {
    fit.slope = sxy.value() / sxx.value();
    fit.intercept = my - fit.slope * mx;
  }
  for (std::size_t i = 0; i < n; ++i) {
    fit.max_residual = std::max(fit.max_residual,
                                std::abs(y[i] - fit.intercept - fit.slope * x[i]));
  }
  return fit;
}

SeriesDiagnostics analyse_series(std::span<const double> x,
                                 std::span<const double> y,
                                 std::size_t fit_points) {
  SeriesDiagnostics d;
  const std::size_t n = x.size();
  if (n != y.size()) throw Error("analyse_series: size mismatch");
  if (n == 0) return d;
  d.band_lo = *std::min_element(y.begin(), y.end());
  d.band_hi = *std::max_element(y.begin(), y.end());
  const bool finite = std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); }) &&
                      std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
  if (n < 4 || !finite || fit_points < 2) return d;
  d.usable = true;

  const std::size_t w = std::min(fit_points, n);
  const LineFit last = fit_line(x.subspan(n - w), y.subspan(n - w));
  d.limit = last.intercept;
  double shifted = last.intercept;
  if (n > w) {
    shifted = fit_line(x.subspan(n - w - 1, w), y.subspan(n - w - 1, w)).intercept;
  } else {
    shifted = fit_line(x.subspan(1), y.subspan(1)).intercept;
  }
  d.error = std::abs(d.limit - shifted) + last.max_residual;
  if (w >= 4) {
    // Curvature the line ignores: distance to the quadratic fit's intercept.
    const std::size_t off = n - w;
    const double scale = std::abs(x[off]) > 0.0 ? std::abs(x[off]) : 1.0;
    Eigen::MatrixXd a(w, 3);
    Eigen::VectorXd b(w);
    for (std::size_t i = 0; i < w; ++i) {
      const double u = x[off + i] / scale;
      a(i, 0) = 1.0;
      a(i, 1) = u;
      a(i, 2) = u * u;
      b(i) = y[off + i];
    }
    const double quad = a.colPivHouseholderQr().solve(b)(0);
    if (std::isfinite(quad)) d.error += std::abs(d.limit - quad);
  }

  const std::size_t third = std::max<std::size_t>(3, n / 3);
  const std::size_t start = n - std::min(third, n - 1);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double previous = 0.0;
  for (std::size_t i = start; i < n; ++i) {
    lo = std::min(lo, y[i]);
    hi = std::max(hi, y[i]);
    const double dx = x[i - 1] - x[i];
    const double l = dx == 0.0 ? y[i] : (y[i] * x[i - 1] - y[i - 1] * x[i]) / dx;
    if (i > start) d.amplitude += std::abs(l - previous);
    previous = l;
  }
  d.tail_range = hi - lo;
  return d;
}

namespace {
std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}
}  // namespace

std::uint64_t CounterRng::bits(std::uint64_t counter) const {
  return splitmix64(splitmix64(seed_) ^ (counter * 0xD1B54A32D192ED03ull));
}

double CounterRng::uniform(std::uint64_t counter) const {
  return static_cast<double>(bits(counter) >> 11) * 0x1.0p-53;
}

std::string format_g12(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

}  // namespace dixlab
