#include "dixlab/limit_maps.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dixlab {

PiecewiseFunction::PiecewiseFunction(PieceKind kind, std::vector<double> breakpoints,
                                     std::vector<double> values, double horizon,
                                     double tail_value)
    : kind_(kind),
      breakpoints_(std::move(breakpoints)),
      values_(std::move(values)),
      horizon_(horizon),
      tail_value_(tail_value) {
  if (breakpoints_.empty() || breakpoints_.size() != values_.size()) {
    throw Error("PiecewiseFunction: need matching, nonempty breakpoints and values");
  }
  for (std::size_t i = 0; i < breakpoints_.size(); ++i) {
    if (!std::isfinite(breakpoints_[i]) || !std::isfinite(values_[i])) {
      throw Error("PiecewiseFunction: breakpoints and values must be finite");
    }
    if (i > 0 && !(breakpoints_[i] > breakpoints_[i - 1])) {
      throw Error("PiecewiseFunction: breakpoints must be strictly increasing");
    }
  }
  if (!(horizon_ >= breakpoints_.back()) || !std::isfinite(tail_value_)) {
    throw Error("PiecewiseFunction: horizon must not precede the last breakpoint");
  }
}

PiecewiseFunction PiecewiseFunction::with_resample_ratio(double ratio) const {
  PiecewiseFunction f = *this;
  f.resample_ratio_ = ratio;
  return f;
}

bool PiecewiseFunction::beyond_horizon(double t) const {
  return kind_ == PieceKind::step ? t >= horizon_ : t > horizon_;
}

std::size_t PiecewiseFunction::piece_index(double t) const {
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
}

double PiecewiseFunction::piece_value(std::size_t i, double t) const {
  if (kind_ == PieceKind::step || i + 1 == breakpoints_.size()) return values_[i];
  const double b0 = breakpoints_[i];
  const double b1 = breakpoints_[i + 1];
  return values_[i] + (t - b0) * (values_[i + 1] - values_[i]) / (b1 - b0);
}

double PiecewiseFunction::piece_integral(std::size_t i, double a, double b) const {
  if (kind_ == PieceKind::step || i + 1 == breakpoints_.size()) return values_[i] * (b - a);
  return 0.5 * (piece_value(i, a) + piece_value(i, b)) * (b - a);
}

double PiecewiseFunction::operator()(double t) const {
  if (!(t >= domain_start())) {
    throw Error("PiecewiseFunction: t=" + format_g12(t) + " precedes the domain start");
  }
  if (beyond_horizon(t)) return tail_value_;
  return piece_value(piece_index(t), t);
}

double PiecewiseFunction::left_limit(double t) const {
  if (!(t > domain_start())) throw Error("PiecewiseFunction::left_limit: need t > domain start");
  if (t > horizon_) return tail_value_;
  const auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const auto i = static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
  return piece_value(i, t);
}

double PiecewiseFunction::integral(double a, double b) const {
  if (!(a >= domain_start())) throw Error("PiecewiseFunction::integral: a precedes the domain");
  if (b <= a) return 0.0;
  CompensatedSum sum;
  const double inside_end = std::min(b, horizon_);
  if (a < inside_end) {
    std::size_t i = piece_index(a);
    double x = a;
    while (x < inside_end) {
      const double next = i + 1 < breakpoints_.size() ? std::min(breakpoints_[i + 1], inside_end)
                                                      : inside_end;
      sum.add(piece_integral(i, x, next));
      x = next;
      ++i;
    }
  }
  if (b > horizon_) sum.add(tail_value_ * (b - std::max(a, horizon_)));
  return sum.value();
}

double PiecewiseFunction::sup_norm() const {
  double m = std::abs(tail_value_);
  for (const double v : values_) m = std::max(m, std::abs(v));
  return m;
}

std::vector<double> shift_discrete(std::span<const double> x, std::uint64_t j) {
  if (j == 0) throw Error("shift_discrete: j must be >= 1");
  if (j >= x.size()) return {};
  return {x.begin() + static_cast<std::ptrdiff_t>(j), x.end()};
}

std::vector<double> dilate_discrete(std::span<const double> x, std::uint64_t j) {
  if (j == 0) throw Error("dilate_discrete: j must be >= 1");
  std::vector<double> out(x.size() * j);
  // 1-based: out_k = x_{ceil(k/j)}
  for (std::size_t k = 1; k <= out.size(); ++k) out[k - 1] = x[(k + j - 1) / j - 1];
  return out;
}

std::vector<double> cesaro_discrete(std::span<const double> x) {
  std::vector<double> out(x.size());
  CompensatedSum sum;
  for (std::size_t n = 0; n < x.size(); ++n) {
    sum.add(x[n]);
    out[n] = sum.value() / static_cast<double>(n + 1);
  }
  return out;
}

namespace {

void require_positive(double a, const char* what) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw Error(std::string(what) + ": parameter must be positive, got " + format_g12(a));
  }
}

// Builds a function from nodes, dropping nodes that do not advance.
PiecewiseFunction from_nodes(PieceKind kind, const std::vector<double>& xs,
                             const std::vector<double>& ys, double horizon, double tail,
                             double ratio) {
  std::vector<double> b, v;
  b.reserve(xs.size());
  v.reserve(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!b.empty() && !(xs[i] > b.back())) continue;
    b.push_back(xs[i]);
    v.push_back(ys[i]);
  }
  horizon = std::max(horizon, b.back());
  return PiecewiseFunction(kind, std::move(b), std::move(v), horizon, tail)
      .with_resample_ratio(ratio);
}

// Inserts geometric nodes strictly between consecutive entries of xs.
std::vector<double> refine_geometric(const std::vector<double>& xs, double ratio) {
  std::vector<double> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out.push_back(xs[i]);
    if (i + 1 == xs.size()) break;
    const double lo = xs[i];
    const double hi = xs[i + 1];
    if (lo > 0.0) {
      for (double t = lo * ratio; t < hi / (1.0 + 1e-9); t *= ratio) out.push_back(t);
    } else {
      std::vector<double> down;
      for (double t = hi / ratio; t > hi * 1e-6; t /= ratio) down.push_back(t);
      out.insert(out.end(), down.rbegin(), down.rend());
    }
  }
  return out;
}

// Inserts uniformly spaced nodes (spacing at most h) between consecutive xs.
std::vector<double> refine_uniform(const std::vector<double>& xs, double h) {
  std::vector<double> out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    out.push_back(xs[i]);
    if (i + 1 == xs.size()) break;
    const double gap = xs[i + 1] - xs[i];
    const auto pieces = static_cast<std::size_t>(std::ceil(gap / h));
    for (std::size_t k = 1; k < pieces; ++k) {
      out.push_back(xs[i] + gap * static_cast<double>(k) / static_cast<double>(pieces));
    }
  }
  return out;
}

}  // namespace

PiecewiseFunction shift_cont(const PiecewiseFunction& f, double a) {
  require_positive(a, "shift_cont");
  const double start = f.domain_start();
  const auto& b = f.breakpoints();
  const auto& v = f.values();
  const double horizon = f.horizon() - a;
  if (horizon < start || (f.kind() == PieceKind::step && horizon == start)) {
    return PiecewiseFunction(f.kind(), {start}, {f.tail_value()}, start, f.tail_value());
  }
  std::vector<double> nb, nv;
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double x = b[i] - a;
    if (x < start) continue;
    if (nb.empty() && x != start) {
      nb.push_back(start);
      nv.push_back(f(start + a));
    }
    nb.push_back(x);
    nv.push_back(v[i]);
  }
  if (nb.empty()) {
    nb.push_back(start);
    nv.push_back(f(start + a));
  }
  return PiecewiseFunction(f.kind(), std::move(nb), std::move(nv), horizon, f.tail_value());
}

PiecewiseFunction dilate_cont(const PiecewiseFunction& f, double a) {
  require_positive(a, "dilate_cont");
  const double start = f.domain_start();
  const auto& b = f.breakpoints();
  const auto& v = f.values();
  std::vector<double> nb, nv;
  // Arguments t/a below the domain start are clamped to it.
  for (std::size_t i = 0; i < b.size(); ++i) {
    const double x = a * b[i];
    if (x < start) continue;
    if (nb.empty() && x != start) {
      nb.push_back(start);
      nv.push_back(a < 1.0 ? f(start / a) : v.front());
    }
    nb.push_back(x);
    nv.push_back(v[i]);
  }
  const double horizon = std::max(a * f.horizon(), start);
  if (nb.empty()) {
    nb.push_back(start);
    nv.push_back(f(start / a));
  }
  return PiecewiseFunction(f.kind(), std::move(nb), std::move(nv), horizon, f.tail_value());
}

PiecewiseFunction power_cont(const PiecewiseFunction& f, double a, double ratio) {
  require_positive(a, "power_cont");
  const double start = f.domain_start();
  if (start != 0.0 && start != 1.0) throw Error("power_cont: domain must start at 0 or 1");
  std::vector<double> images;
  for (const double x : f.breakpoints()) images.push_back(std::pow(x, 1.0 / a));
  const double horizon = std::pow(f.horizon(), 1.0 / a);
  if (f.kind() == PieceKind::step) {
    return PiecewiseFunction(PieceKind::step, images, f.values(), horizon, f.tail_value());
  }
  if (horizon > images.back()) images.push_back(horizon);
  const auto nodes = refine_geometric(images, ratio);
  std::vector<double> ys;
  for (const double t : nodes) ys.push_back(f(std::pow(t, a)));
  return from_nodes(PieceKind::linear, nodes, ys, horizon, f.tail_value(), ratio);
}

double cesaro_at(const PiecewiseFunction& f, double t) {
  if (f.domain_start() != 0.0) throw Error("cesaro: function must live on [0, inf)");
  if (t < 0.0) throw Error("cesaro: t must be nonnegative");
  if (t == 0.0) return f(0.0);
  return f.integral(0.0, t) / t;
}

PiecewiseFunction cesaro_cont(const PiecewiseFunction& f, double ratio) {
  if (f.domain_start() != 0.0) throw Error("cesaro_cont: function must live on [0, inf)");
  std::vector<double> xs = f.breakpoints();
  if (f.horizon() > xs.back()) xs.push_back(f.horizon());
  const auto nodes = refine_geometric(xs, ratio);
  std::vector<double> ys;
  ys.reserve(nodes.size());
  for (const double t : nodes) ys.push_back(cesaro_at(f, t));
  return from_nodes(PieceKind::linear, nodes, ys, f.horizon(), f.tail_value(), ratio);
}

PiecewiseFunction exp_conjugate(const PiecewiseFunction& g, double ratio) {
  if (g.domain_start() != 1.0) throw Error("exp_conjugate: function must live on [1, inf)");
  std::vector<double> images;
  for (const double x : g.breakpoints()) images.push_back(std::log(x));
  const double horizon = std::log(g.horizon());
  if (g.kind() == PieceKind::step) {
    return PiecewiseFunction(PieceKind::step, images, g.values(), horizon, g.tail_value());
  }
  if (horizon > images.back()) images.push_back(horizon);
  const auto nodes = refine_uniform(images, std::log(ratio));
  std::vector<double> ys;
  for (const double t : nodes) ys.push_back(g(std::exp(t)));
  return from_nodes(PieceKind::linear, nodes, ys, horizon, g.tail_value(), ratio);
}

PiecewiseFunction log_conjugate(const PiecewiseFunction& f, double ratio) {
  if (f.domain_start() != 0.0) throw Error("log_conjugate: function must live on [0, inf)");
  std::vector<double> images;
  for (const double x : f.breakpoints()) images.push_back(std::exp(x));
  const double horizon = std::exp(f.horizon());
  if (!std::isfinite(horizon)) throw Error("log_conjugate: horizon overflows under exp");
  if (f.kind() == PieceKind::step) {
    return PiecewiseFunction(PieceKind::step, images, f.values(), horizon, f.tail_value());
  }
  if (horizon > images.back()) images.push_back(horizon);
  const auto nodes = refine_geometric(images, ratio);
  std::vector<double> ys;
  for (const double t : nodes) ys.push_back(f(std::log(t)));
  return from_nodes(PieceKind::linear, nodes, ys, horizon, f.tail_value(), ratio);
}

FunctionMap conjugate(FunctionMap g, double ratio) {
  return [g = std::move(g), ratio](const PiecewiseFunction& h) {
    return log_conjugate(g(exp_conjugate(h, ratio)), ratio);
  };
}

PiecewiseFunction floor_embed(std::span<const double> x) {
  if (x.empty()) return PiecewiseFunction(PieceKind::step, {0.0}, {0.0}, 0.0, 0.0);
  std::vector<double> b(x.size());
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = static_cast<double>(k);
  return PiecewiseFunction(PieceKind::step, std::move(b), {x.begin(), x.end()},
                           static_cast<double>(x.size()), 0.0);
}

PiecewiseFunction linear_embed(std::span<const double> x) {
  if (x.empty()) return PiecewiseFunction(PieceKind::linear, {0.0}, {0.0}, 0.0, 0.0);
  std::vector<double> b(x.size());
  for (std::size_t k = 0; k < b.size(); ++k) b[k] = static_cast<double>(k);
  return PiecewiseFunction(PieceKind::linear, std::move(b), {x.begin(), x.end()},
                           static_cast<double>(x.size() - 1), 0.0);
}

std::vector<double> restrict_to_integers(const PiecewiseFunction& f) {
  std::vector<double> out;
  for (double k = std::ceil(f.domain_start()); !f.beyond_horizon(k); k += 1.0) {
    out.push_back(f(k));
  }
  return out;
}

double window_avg_at(const PiecewiseFunction& f, double t) { return f.integral(t, t + 1.0); }

PiecewiseFunction window_avg(const PiecewiseFunction& f) {
  const double start = f.domain_start();
  const double end = std::max(start, f.horizon() - 1.0);
  std::vector<double> xs{start, end};
  for (const double b : f.breakpoints()) {
    if (b >= start && b <= end) xs.push_back(b);
    if (b - 1.0 >= start && b - 1.0 <= end) xs.push_back(b - 1.0);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  if (f.kind() == PieceKind::linear) xs = refine_uniform(xs, 0.25);
  std::vector<double> ys;
  ys.reserve(xs.size());
  for (const double t : xs) ys.push_back(window_avg_at(f, t));
  return from_nodes(PieceKind::linear, xs, ys, end, f.tail_value(), 0.0);
}

std::vector<double> restrict_window_avg(const PiecewiseFunction& f) {
  std::vector<double> out;
  for (double k = std::ceil(f.domain_start()); k + 1.0 <= f.horizon(); k += 1.0) {
    out.push_back(f.integral(k, k + 1.0));
  }
  return out;
}

namespace {

// int_{x1}^{x2} (1/s) int_0^s f(u) du ds, exactly on the pieces of f.
double cesaro_window_integral(const PiecewiseFunction& f, double x1, double x2) {
  const auto& b = f.breakpoints();
  CompensatedSum total;
  double F = f.integral(0.0, x1);
  double c = x1;
  while (c < x2) {
    const auto it = std::upper_bound(b.begin(), b.end(), c);
    double d = it == b.end() ? x2 : std::min(*it, x2);
    if (c < f.horizon() && d > f.horizon()) d = f.horizon();
    double A = 0.0, B = 0.0, C = 0.0;
    if (f.beyond_horizon(c)) {
      B = f.tail_value();
      A = F - B * c;
    } else {
      const double vc = f(c);
      const double m = f.kind() == PieceKind::linear && d > c ? (f.left_limit(d) - vc) / (d - c) : 0.0;
      C = 0.5 * m;
      B = vc - m * c;
      A = F - vc * c + 0.5 * m * c * c;
    }
    if (c > 0.0 && A != 0.0) total.add(A * std::log(d / c));
    total.add(B * (d - c));
    total.add(0.5 * C * (d * d - c * c));
    F += f.integral(c, d);
    c = d;
  }
  return total.value();
}

void require_within(double needed, double horizon, double t) {
  if (needed > horizon) {
    throw Error("commutator_defect: t=" + format_g12(t) + " is beyond the input horizon " +
                format_g12(horizon));
  }
}

}  // namespace

double commutator_defect(DefectPair pair, std::span<const double> a, double t,
                         std::uint64_t j) {
  if (t < 0.0) throw Error("commutator_defect: t must be nonnegative");
  const auto K = static_cast<double>(a.size());
  switch (pair) {
    case DefectPair::shift_floor: {
      require_within(t + static_cast<double>(j), K - 0.5, t);
      const double lhs = shift_cont(floor_embed(a), static_cast<double>(j))(t);
      const double rhs = floor_embed(shift_discrete(a, j))(t);
      return std::abs(lhs - rhs);
    }
    case DefectPair::shift_linear: {
      require_within(t + static_cast<double>(j), K - 1.0, t);
      const double lhs = shift_cont(linear_embed(a), static_cast<double>(j))(t);
      const double rhs = linear_embed(shift_discrete(a, j))(t);
      return std::abs(lhs - rhs);
    }
    case DefectPair::cesaro_floor: {
      require_within(t, K - 0.5, t);
      const double lhs = cesaro_at(floor_embed(a), t);
      const double rhs = floor_embed(cesaro_discrete(a))(t);
      return std::abs(lhs - rhs);
    }
    case DefectPair::cesaro_linear: {
      require_within(t, K - 1.0, t);
      const double lhs = cesaro_at(linear_embed(a), t);
      const double rhs = linear_embed(cesaro_discrete(a))(t);
      return std::abs(lhs - rhs);
    }
    case DefectPair::shift_window:
    case DefectPair::cesaro_window:
      throw Error("commutator_defect: window pairs act on functions, not sequences");
  }
  return 0.0;
}

double commutator_defect(DefectPair pair, const PiecewiseFunction& f, double t,
                         std::uint64_t j) {
  if (t < 0.0) throw Error("commutator_defect: t must be nonnegative");
  if (f.domain_start() != 0.0) throw Error("commutator_defect: function must live on [0, inf)");
  const double n = std::floor(t);
  switch (pair) {
    case DefectPair::shift_window: {
      const auto jd = static_cast<double>(j);
      require_within(n + jd + 1.0, f.horizon(), t);
      const double lhs = f.integral(n + jd, n + jd + 1.0);          // T_j(rE f)(n)
      const double rhs = shift_cont(f, jd).integral(n, n + 1.0);    // rE(T_j f)(n)
      return std::abs(lhs - rhs);
    }
    case DefectPair::cesaro_window: {
      require_within(n + 1.0, f.horizon(), t);
      CompensatedSum sum;
      for (double i = 0.0; i <= n; i += 1.0) sum.add(f.integral(i, i + 1.0));
      const double lhs = sum.value() / (n + 1.0);                    // C(rE f)(n)
      const double rhs = cesaro_window_integral(f, n, n + 1.0);      // rE(C f)(n)
      return std::abs(lhs - rhs);
    }
    default:
      throw Error("commutator_defect: embedding pairs act on sequences");
  }
}

double oscillation_K(const PiecewiseFunction& f, double s) {
  const double fs = f(s);
  const double end = s + 1.0;
  double k = std::abs(f.left_limit(end) - fs);
  for (const double b : f.breakpoints()) {
    if (b <= s) continue;
    if (b >= end) break;
    k = std::max(k, std::abs(f(b) - fs));
    k = std::max(k, std::abs(f.left_limit(b) - fs));
  }
  const double h = f.horizon();
  if (h > s && h < end) {
    k = std::max(k, std::abs(f.tail_value() - fs));
    k = std::max(k, std::abs(f.left_limit(h) - fs));
  }
  return k;
}

PiecewiseFunction oscillation_profile(const PiecewiseFunction& f, double start, double end,
                                      double spacing) {
  require_positive(spacing, "oscillation_profile");
  std::vector<double> xs, ys;
  const auto count = static_cast<std::size_t>(std::floor((end - start) / spacing));
  for (std::size_t i = 0; i <= count; ++i) {
    const double s = start + spacing * static_cast<double>(i);
    xs.push_back(s);
    ys.push_back(oscillation_K(f, s));
  }
  return PiecewiseFunction(PieceKind::linear, std::move(xs), std::move(ys),
                           start + spacing * static_cast<double>(count), 0.0);
}

AlmostConvergenceResult almost_convergence_test(const PiecewiseFunction& f,
                                                std::span<const double> windows,
                                                double tolerance) {
  if (windows.empty()) throw Error("almost_convergence_test: empty window schedule");
  for (std::size_t i = 0; i < windows.size(); ++i) {
    if (!(windows[i] > 0.0) || (i > 0 && !(windows[i] > windows[i - 1]))) {
      throw Error("almost_convergence_test: windows must be positive and increasing");
    }
  }
  for (const double v : f.values()) {
    if (v < 0.0) throw Error("almost_convergence_test: function must be nonnegative");
  }
  if (f.tail_value() < 0.0) throw Error("almost_convergence_test: function must be nonnegative");
  const double start = f.domain_start();
  if (f.horizon() - start < windows.back()) {
    throw Error("almost_convergence_test: horizon " + format_g12(f.horizon()) +
                " is shorter than the largest window " + format_g12(windows.back()));
  }
  AlmostConvergenceResult result;
  for (const double w : windows) {
    const double last = f.horizon() - w;
    std::vector<double> ts{start, last};
    for (const double b : f.breakpoints()) {
      if (b >= start && b <= last) ts.push_back(b);
      if (b - w >= start && b - w <= last) ts.push_back(b - w);
    }
    const double h = w / 8.0;
    for (double t = start; t < last; t += h) ts.push_back(t);
    double sup = 0.0;
    for (const double t : ts) sup = std::max(sup, f.integral(t, t + w) / w);
    result.windows.push_back(w);
    result.window_sups.push_back(sup);
  }
  result.passed = result.window_sups.back() < tolerance;
  return result;
}

}  // namespace dixlab
