#include "dixlab/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numbers>

#include <boost/math/quadrature/exp_sinh.hpp>

namespace dixlab {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

std::string to_string(Method m) {
  switch (m) {
    case Method::dixmier_alpha: return "dixmier_alpha";
    case Method::zeta_residue: return "zeta_residue";
    case Method::heat_raw: return "heat_raw";
    case Method::heat_cesaro: return "heat_cesaro";
  }
  return "unknown";
}

std::string to_string(EstimateStatus s) {
  switch (s) {
    case EstimateStatus::Converged: return "Converged";
    case EstimateStatus::Oscillating: return "Oscillating";
    case EstimateStatus::Undetermined: return "Undetermined";
  }
  return "unknown";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Measurable: return "Measurable";
    case Verdict::NotMeasurable: return "NotMeasurable";
    case Verdict::Undetermined: return "Undetermined";
  }
  return "unknown";
}

std::optional<Method> method_from_string(const std::string& name) {
  for (const Method m : {Method::dixmier_alpha, Method::zeta_residue, Method::heat_raw,
                         Method::heat_cesaro}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

TraceEstimate classify_series(Method method, std::span<const double> checkpoints,
                              std::span<const double> values, std::span<const double> coord,
                              bool extrapolate, const EstimatorPolicy& policy) {
  TraceEstimate e;
  e.method = method;
  e.value = kNaN;
  for (std::size_t i = 0; i < values.size(); ++i) e.raw_series.push_back({checkpoints[i], values[i]});
  if (values.empty()) {
    e.notes = "empty schedule";
    return e;
  }
  const auto d = analyse_series(coord, values, policy.fit_points);
  e.band_lo = d.band_lo;
  e.band_hi = d.band_hi;
  if (!d.usable) {
    e.notes = "series not usable (need >= 4 finite scheduled values)";
    return e;
  }
  e.oscillation = d.amplitude;
  if (d.amplitude < policy.tol.conv) {
    e.status = EstimateStatus::Converged;
    e.extrapolated = extrapolate;
    if (extrapolate) {
      e.value = d.limit;
      e.error = d.error;
    } else {
      e.value = values.back();
      e.error = std::abs(values.back() - values[values.size() - 2]);
    }
    const bool nonnegative =
        std::all_of(values.begin(), values.end(), [](double v) { return v >= 0.0; });
    if (nonnegative && e.value < 0.0) {
      e.notes = "extrapolant " + format_g12(e.value) + " clamped at 0";
      e.error = std::max(e.error, -e.value);
      e.value = 0.0;
    }
  } else if (d.amplitude > policy.tol.osc) {
    e.status = EstimateStatus::Oscillating;
    e.value = 0.5 * (d.band_lo + d.band_hi);
  } else {
    e.notes = "extrapolant variation " + format_g12(d.amplitude) +
              " between the convergence and oscillation tolerances";
  }
  return e;
}

TraceEstimate dixmier_estimate(const SingularSequence& x, std::span<const std::uint64_t> schedule,
                               bool extrapolate, const EstimatorPolicy& policy) {
  std::vector<std::uint64_t> ks(schedule.begin(), schedule.end());
  if (ks.empty()) {
    std::uint64_t horizon = x.length();
    if (x.finitely_supported()) horizon = std::max<std::uint64_t>(horizon, 1u << 20);
    ks = dyadic_schedule(horizon);
  }
  std::vector<double> cps, alphas, coord;
  if (!ks.empty()) {
    const auto series = log_average(x, ks);
    alphas = series.alphas;
  }
  for (const auto k : ks) {
    cps.push_back(static_cast<double>(k));
    coord.push_back(1.0 / std::log1p(static_cast<double>(k)));
  }
  if (ks.empty() || ks.back() < policy.min_horizon) {
    TraceEstimate e;
    e.method = Method::dixmier_alpha;
    e.value = kNaN;
    for (std::size_t i = 0; i < ks.size(); ++i) e.raw_series.push_back({cps[i], alphas[i]});
    e.notes = "horizon " + std::to_string(ks.empty() ? 0 : ks.back()) + " below " +
              std::to_string(policy.min_horizon);
    return e;
  }
  auto e = classify_series(Method::dixmier_alpha, cps, alphas, coord, extrapolate, policy);
  if (e.notes.empty()) {
    e.notes = "checkpoints " + std::to_string(ks.front()) + ".." + std::to_string(ks.back());
  }
  return e;
}

std::vector<double> default_zeta_schedule() {
  std::vector<double> ks;
  for (int k = 10; k <= 200; k += 10) ks.push_back(k);
  return ks;
}

TraceEstimate zeta_residue_estimate(const ZetaEvaluator& zeta, std::span<const double> k_schedule,
                                    bool extrapolate, const EstimatorPolicy& policy) {
  std::vector<double> ks(k_schedule.begin(), k_schedule.end());
  if (ks.empty()) ks = default_zeta_schedule();
  std::vector<double> values, coord;
  for (const double k : ks) {
    if (!(k > 0.0)) throw Error("zeta_residue_estimate: k must be positive");
    const double s = 1.0 + 1.0 / k;
    double z = 0.0;
    try {
      z = zeta(s);
    } catch (const Error& err) {
      throw Error("zeta evaluation failed at s=" + format_g12(s) + ": " + err.what());
    }
    if (!std::isfinite(z)) throw Error("zeta diverges at s=" + format_g12(s));
    values.push_back(z / k);
    coord.push_back(1.0 / k);
  }
  return classify_series(Method::zeta_residue, ks, values, coord, extrapolate, policy);
}

TraceEstimate zeta_residue_estimate(const SingularSequence& x, std::span<const double> k_schedule,
                                    bool extrapolate, const EstimatorPolicy& policy) {
  std::vector<double> ks(k_schedule.begin(), k_schedule.end());
  if (ks.empty()) ks = default_zeta_schedule();
  for (const double k : ks) {
    const double s = 1.0 + 1.0 / k;
    const double ratio = head_domination_ratio(x, s);
    if (ratio > 1e-3) {
      TraceEstimate e;
      e.method = Method::zeta_residue;
      e.value = kNaN;
      e.notes = "unseen tail may carry " + format_g12(ratio) + " of the sum at s=" +
                format_g12(s) + "; no tail model";
      return e;
    }
  }
  return zeta_residue_estimate([&x](double s) { return sequence_zeta(x, s); }, ks, extrapolate,
                               policy);
}

double zeta_norm_z1(const ZetaEvaluator& zeta, std::span<const double> k_schedule) {
  std::vector<double> values;
  for (const double k : k_schedule) {
    values.push_back(std::pow(zeta(1.0 + 1.0 / k), k / (k + 1.0)) / k);
  }
  if (values.empty()) return kNaN;
  return *std::max_element(values.begin() + static_cast<std::ptrdiff_t>(values.size() / 2),
                           values.end());
}

double heat_trace(const SingularSequence& x, double t, double alpha_exp) {
  if (!(t > 0.0) || !(alpha_exp > 0.0)) throw Error("heat_trace: need t > 0 and alpha > 0");
  CompensatedSum sum;
  bool truncated = false;
  for (const double v : x.values()) {
    if (v == 0.0) {
      truncated = true;
      break;
    }
    const double term = std::exp(-std::pow(t * v, -alpha_exp));
    sum.add(term);
    if (term < 1e-18 * sum.value()) {
      truncated = true;
      break;
    }
  }
  if (!truncated && x.tail()) {
    const PowerLogTail tail = *x.tail();
    const double u0 = static_cast<double>(x.length()) + 0.5;
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [&](double w) { return std::exp(-std::pow(t * tail(u0 + w), -alpha_exp)); };
    sum.add(integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity()));
  }
  return sum.value() / t;
}

std::vector<double> default_heat_schedule(double t_max) {
  if (!(t_max > 100.0)) throw Error("default_heat_schedule: t_max must exceed 100");
  std::vector<double> ts;
  const int steps = static_cast<int>(std::ceil(3.0 * std::log10(t_max / 100.0) - 1e-9));
  for (int i = 0; i <= steps; ++i) {
    ts.push_back(100.0 * std::pow(t_max / 100.0, static_cast<double>(i) / steps));
  }
  ts.back() = t_max;
  return ts;
}

TraceEstimate heat_estimate(const HeatEvaluator& heat, std::span<const double> t_schedule,
                            double alpha_exp, HeatSmoothing smoothing, bool extrapolate,
                            const EstimatorPolicy& policy) {
  if (!(alpha_exp > 0.0)) throw Error("heat_estimate: alpha must be positive");
  const Method method = smoothing == HeatSmoothing::raw ? Method::heat_raw : Method::heat_cesaro;
  std::vector<double> ts(t_schedule.begin(), t_schedule.end());
  if (ts.empty()) ts = default_heat_schedule();
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] > 0.0) || (i > 0 && !(ts[i] > ts[i - 1]))) {
      throw Error("heat_estimate: t schedule must be positive and increasing");
    }
  }
  const double norm = std::tgamma(1.0 / alpha_exp + 1.0);
  std::vector<double> values, coord;
  if (smoothing == HeatSmoothing::raw) {
    for (const double t : ts) {
      values.push_back(heat(t, alpha_exp) / norm);
      coord.push_back(1.0 / t);
    }
    return classify_series(method, ts, values, coord, extrapolate, policy);
  }

  if (!(ts.front() > 1.0)) throw Error("heat_estimate: Cesaro schedule must start above t = 1");
  // Trapezoid in u = log s over each [t_{i-1}, t_i] (t_{-1} = 1) at three
  // resolutions (4m, 2m, m pieces, m = ceil(log(ratio) / log 1.1)), then
  // Romberg. The expansion is even in h, so |S_fine - S_mid| / 15 bounds the
  // error of the extrapolated integral.
  constexpr double kRatio = 1.1;
  CompensatedSum t_fine, t_mid, t_coarse;
  double worst = 0.0;
  double left = 1.0;
  double g_left = heat(1.0, alpha_exp);
  for (const double t : ts) {
    const auto m = static_cast<int>(std::ceil(std::log(t / left) / std::log(kRatio) - 1e-12));
    const int pieces = 4 * std::max(m, 1);
    const double h = std::log(t / left) / pieces;
    double g_prev = g_left;
    for (int i = 1; i <= pieces; ++i) {
      const double g = i == pieces ? heat(t, alpha_exp)
                                   : heat(left * std::exp(h * i), alpha_exp);
      const double w = i == pieces ? 0.5 : 1.0;
      t_fine.add(h * w * g);
      if (i % 2 == 0) t_mid.add(2.0 * h * w * g);
      if (i % 4 == 0) t_coarse.add(4.0 * h * w * g);
      g_prev = g;
    }
    t_fine.add(0.5 * h * g_left);
    t_mid.add(h * g_left);
    t_coarse.add(2.0 * h * g_left);
    g_left = g_prev;
    left = t;
    const double s_fine = t_fine.value() + (t_fine.value() - t_mid.value()) / 3.0;
    const double s_mid = t_mid.value() + (t_mid.value() - t_coarse.value()) / 3.0;
    const double integral = s_fine + (s_fine - s_mid) / 15.0;
    const double logt = std::log(t);
    const double value = integral / logt / norm;
    const double err = std::abs(s_fine - s_mid) / 15.0 / logt / norm;
    worst = std::max(worst, err / std::max(std::abs(value), 1e-300));
    values.push_back(value);
    coord.push_back(1.0 / logt);
  }
  auto e = classify_series(method, ts, values, coord, extrapolate, policy);
  if (worst > policy.quadrature_tol) {
    e.status = EstimateStatus::Undetermined;
    e.value = kNaN;
    e.notes = "Cesaro quadrature error " + format_g12(worst) + " exceeds " +
              format_g12(policy.quadrature_tol);
  }
  return e;
}

MeasurabilityReport measurability_report(std::vector<TraceEstimate> estimates, double rel_tol,
                                         const EstimatorPolicy& policy) {
  if (estimates.size() < 2) throw Error("measurability_report: needs at least two methods");
  MeasurabilityReport r;
  r.estimates = std::move(estimates);
  bool all_converged = true;
  bool oscillating = false;
  double scale = 1.0;
  for (const auto& e : r.estimates) {
    all_converged = all_converged && e.status == EstimateStatus::Converged;
    oscillating = oscillating ||
                  (e.status == EstimateStatus::Oscillating && e.oscillation > policy.tol.osc);
    if (std::isfinite(e.value)) scale = std::max(scale, std::abs(e.value));
  }
  for (std::size_t i = 0; i < r.estimates.size(); ++i) {
    for (std::size_t j = i + 1; j < r.estimates.size(); ++j) {
      const double d = std::abs(r.estimates[i].value - r.estimates[j].value);
      if (std::isfinite(d)) r.max_pairwise_discrepancy = std::max(r.max_pairwise_discrepancy, d);
    }
  }
  if (oscillating) {
    r.verdict = Verdict::NotMeasurable;
    r.notes = "at least one method oscillates";
  } else if (all_converged && r.max_pairwise_discrepancy <= rel_tol * scale) {
    r.verdict = Verdict::Measurable;
  } else if (all_converged) {
    r.notes = "methods converged to values " + format_g12(r.max_pairwise_discrepancy) +
              " apart";
  } else {
    r.notes = "some method undetermined";
  }
  return r;
}

TraceEstimate product_zeta_sequence(const ProductOperand& A, const LatticeShells& shells,
                                    double power, std::span<const double> k_schedule,
                                    const EstimatorPolicy& policy) {
  ZetaEvaluator zeta;
  std::shared_ptr<LatticeShells> sub;
  if (const auto* f = std::get_if<FourierMultiplier>(&A)) {
    if (f->dimension != shells.dimension) {
      throw Error("product_zeta_sequence: multiplier and torus dimensions differ");
    }
    // Tr(f T^s) = sum_m <e_m, f e_m> mu_m^s = f^(0) zeta_T(s)
    const auto mean = f->mean();
    if (mean.imag() != 0.0) {
      throw Error("product_zeta_sequence: f^(0) is not real; split f into real and imaginary parts");
    }
    zeta = [&shells, power, c = mean.real()](double s) {
      return c * lattice_zeta(shells, s, power).value;
    };
  } else if (const auto* p = std::get_if<SublatticeProjection>(&A)) {
    if (p->stride < 1) throw Error("product_zeta_sequence: stride must be >= 1");
    sub = std::make_shared<LatticeShells>(
        lattice_shells(shells.dimension, shells.cutoff / p->stride));
    zeta = [sub, power, q = p->stride](double s) {
      return lattice_zeta(*sub, s, power, q).value;
    };
  } else {
    throw Error(
        "product_zeta_sequence: no exact product-trace formula for a dense operator; use "
        "multiplication_matrix with singular_values instead");
  }
  return zeta_residue_estimate(zeta, k_schedule, true, policy);
}

SingularSequence diagonal_product(const SingularSequence& x, const SingularSequence& y) {
  const std::size_t n = std::min(x.length(), y.length());
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = x.values()[i] * y.values()[i];
  std::optional<PowerLogTail> tail;
  if (x.tail() && y.tail() && x.length() == y.length()) {
    tail = PowerLogTail{x.tail()->C * y.tail()->C, x.tail()->a + y.tail()->a,
                        x.tail()->b + y.tail()->b};
  }
  return SingularSequence::from_sorted(std::move(v), tail);
}

SingularSequence diagonal_power(const SingularSequence& x, double p) {
  if (!(p > 0.0)) throw Error("diagonal_power: exponent must be positive");
  std::vector<double> v(x.values().begin(), x.values().end());
  for (double& e : v) e = std::pow(e, p);
  std::optional<PowerLogTail> tail;
  if (x.tail()) tail = PowerLogTail{std::pow(x.tail()->C, p), x.tail()->a * p, x.tail()->b * p};
  return SingularSequence::from_sorted(std::move(v), tail);
}

HolderResult holder_check(const SingularSequence& t, const SingularSequence& v, double p,
                          std::span<const std::uint64_t> schedule,
                          const EstimatorPolicy& policy) {
  if (!(p > 1.0)) throw Error("holder_check: need p > 1");
  const double q = p / (p - 1.0);
  const auto tv = diagonal_product(t, v);
  const auto tp = diagonal_power(t, p);
  const auto vq = diagonal_power(v, q);
  std::vector<std::uint64_t> ks(schedule.begin(), schedule.end());
  if (ks.empty()) ks = dyadic_schedule(tv.length());
  const auto e_tv = dixmier_estimate(tv, ks, true, policy);
  const auto e_tp = dixmier_estimate(tp, ks, true, policy);
  const auto e_vq = dixmier_estimate(vq, ks, true, policy);
  HolderResult r;
  // Only unusable data blocks a verdict. A series classified Undetermined for
  // its oscillation amplitude still admits the per-checkpoint comparison.
  auto usable = [&](const TraceEstimate& e) {
    return e.raw_series.size() == ks.size() && ks.size() >= 4 &&
           ks.back() >= policy.min_horizon &&
           std::all_of(e.raw_series.begin(), e.raw_series.end(),
                       [](const SeriesPoint& q) { return std::isfinite(q.value); });
  };
  if (!usable(e_tv) || !usable(e_tp) || !usable(e_vq)) {
    r.notes = "an estimate is undetermined";
    return r;
  }
  const auto conv = EstimateStatus::Converged;
  if (e_tv.status == conv && e_tp.status == conv && e_vq.status == conv) {
    r.mode = HolderMode::converged;
    const double lhs = e_tv.value;
    const double rhs = std::pow(e_tp.value, 1.0 / p) * std::pow(e_vq.value, 1.0 / q);
    double slack_tol = e_tv.error + 1e-12 * std::abs(rhs);
    if (e_tp.value > 0.0) slack_tol += rhs * e_tp.error / (p * e_tp.value);
    if (e_vq.value > 0.0) slack_tol += rhs * e_vq.error / (q * e_vq.value);
    r.slack = rhs - lhs;
    r.holds = lhs <= rhs + slack_tol;
    r.notes = "extrapolated values, allowance " + format_g12(slack_tol);
    return r;
  }
  // alpha_N(TV) <= alpha_N(T^p)^{1/p} alpha_N(V^q)^{1/q} holds at every N.
  r.mode = HolderMode::per_checkpoint;
  r.slack = std::numeric_limits<double>::infinity();
  bool holds = true;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double lhs = e_tv.raw_series[i].value;
    const double rhs = std::pow(e_tp.raw_series[i].value, 1.0 / p) *
                       std::pow(e_vq.raw_series[i].value, 1.0 / q);
    r.slack = std::min(r.slack, rhs - lhs);
    if (lhs > rhs * (1.0 + 1e-12)) holds = false;
  }
  r.holds = holds;
  r.notes = "per-checkpoint comparison over " + std::to_string(ks.size()) + " checkpoints";
  return r;
}

MellinModel mellin_single(double lambda) {
  if (!(lambda > 0.0)) throw Error("mellin_single: eigenvalue must be positive");
  MellinModel m;
  m.name = "single";
  m.heat = [lambda](double t) { return std::exp(-t * lambda); };
  m.zeta = [lambda](double s) { return std::pow(lambda, -s); };
  m.lambda_min = lambda;
  m.small_t_order = 0.0;
  return m;
}

MellinModel mellin_squares(std::uint64_t N) {
  if (N == 0) throw Error("mellin_squares: need N >= 1");
  const double a = static_cast<double>(N) + 0.5;
  MellinModel m;
  m.name = "squares";
  m.heat = [N, a](double t) {
    CompensatedSum sum;
    for (std::uint64_t n = 1; n <= N; ++n) {
      const double x = static_cast<double>(n);
      const double term = std::exp(-t * x * x);
      sum.add(term);
      if (term < 1e-18 * sum.value()) return sum.value();
    }
    // int_a^inf e^{-t x^2} dx
    sum.add(0.5 * std::sqrt(std::numbers::pi / t) * std::erfc(a * std::sqrt(t)));
    return sum.value();
  };
  m.zeta = [N, a](double s) {
    CompensatedSum sum;
    for (std::uint64_t n = N; n >= 1; --n) sum.add(std::pow(static_cast<double>(n), -2.0 * s));
    sum.add(std::pow(a, 1.0 - 2.0 * s) / (2.0 * s - 1.0));
    return sum.value();
  };
  m.lambda_min = 1.0;
  m.small_t_order = 0.5;
  return m;
}

MellinModel mellin_torus(const LatticeShells& shells) {
  if (shells.dimension != 2) throw Error("mellin_torus: needs the n = 2 lattice");
  auto sh = std::make_shared<LatticeShells>(shells);
  const double b = 1.0 + shells.tail_radius() * shells.tail_radius();
  MellinModel m;
  m.name = "torus";
  m.heat = [sh, b](double t) {
    CompensatedSum sum;
    for (std::uint64_t j = 0; j < sh->counts.size(); ++j) {
      if (sh->counts[j] == 0) continue;
      const double term = static_cast<double>(sh->counts[j]) * std::exp(-t * (1.0 + j));
      sum.add(term);
      if (term < 1e-18 * sum.value()) return sum.value();
    }
    // pi int_b^inf e^{-t u} du
    sum.add(std::numbers::pi * std::exp(-t * b) / t);
    return sum.value();
  };
  m.zeta = [sh, b](double s) {
    CompensatedSum sum;
    for (std::uint64_t j = sh->counts.size(); j-- > 0;) {
      if (sh->counts[j] == 0) continue;
      sum.add(static_cast<double>(sh->counts[j]) * std::pow(1.0 + j, -s));
    }
    sum.add(std::numbers::pi * std::pow(b, 1.0 - s) / (s - 1.0));
    return sum.value();
  };
  m.lambda_min = 1.0;
  m.small_t_order = 1.0;
  return m;
}

MellinResult mellin_check(const MellinModel& model, double s, double rel_tol) {
  if (!(s > model.small_t_order)) {
    throw Error("mellin_check: s=" + format_g12(s) + " is not past the abscissa " +
                format_g12(model.small_t_order));
  }
  MellinResult r;
  r.expected = std::tgamma(s) * model.zeta(s);
  // Integrand e^{s u} Tr e^{-e^u Q}: ~e^{(s-d)u} as u -> -inf, doubly
  // exponential decay as u -> +inf.
  const double u_lo = std::max(-700.0, -45.0 / (s - model.small_t_order));
  double t_hi = 50.0 / model.lambda_min;
  for (int i = 0; i < 8; ++i) {
    t_hi = (50.0 + s * std::max(0.0, std::log(t_hi))) / model.lambda_min;
  }
  const double u_hi = std::log(t_hi);
  auto f = [&](double u) { return std::exp(s * u) * model.heat(std::exp(u)); };
  double h = 0.125;
  CompensatedSum sum;
  auto n = static_cast<std::int64_t>(std::ceil((u_hi - u_lo) / h));
  h = (u_hi - u_lo) / static_cast<double>(n);
  for (std::int64_t i = 0; i <= n; ++i) sum.add(f(u_lo + h * static_cast<double>(i)));
  double previous = h * sum.value();
  for (int level = 0; level < 10; ++level) {
    for (std::int64_t i = 0; i < n; ++i) sum.add(f(u_lo + h * (static_cast<double>(i) + 0.5)));
    n *= 2;
    h *= 0.5;
    const double current = h * sum.value();
    r.integral = current;
    r.quadrature_error = std::abs(current - previous);
    if (r.quadrature_error <= 1e-3 * rel_tol * std::abs(current)) {
      r.relative_error = std::abs(current - r.expected) / std::abs(r.expected);
      r.passed = r.relative_error <= rel_tol;
      return r;
    }
    previous = current;
  }
  r.relative_error = std::abs(r.integral - r.expected) / std::abs(r.expected);
  return r;
}

}  // namespace dixlab
