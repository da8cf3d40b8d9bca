#include "dixlab/seq_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace dixlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kDirectTerms = 1024;

// int_{u1}^{u2} C u^b e^{(1-a)u} du, the tail mass between x = e^{u1} and e^{u2}.
double tail_mass(const PowerLogTail& t, double u1, double u2) {
  if (u2 <= u1) return 0.0;
  if (t.b == 0.0) {
    if (t.a == 1.0) return t.C * (u2 - u1);
    const double c = 1.0 - t.a;
    return t.C * (std::exp(c * u2) - std::exp(c * u1)) / c;
  }
  if (t.a == 1.0) {
    if (t.b == -1.0) return t.C * (std::log(u2) - std::log(u1));
    return t.C * (std::pow(u2, t.b + 1.0) - std::pow(u1, t.b + 1.0)) / (t.b + 1.0);
  }
  auto f = [&](double u) { return t.C * std::pow(u, t.b) * std::exp((1.0 - t.a) * u); };
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, u1, u2, 15, 1e-13);
}

}  // namespace

double PowerLogTail::operator()(double n) const {
  const double logn = std::log(n);
  const double log_factor = b == 0.0 ? 1.0 : std::pow(logn, b);
  return C * log_factor * std::pow(n, -a);
}

double PowerLogTail::partial_sum(std::uint64_t first, std::uint64_t last) const {
  if (last < first) return 0.0;
  CompensatedSum sum;
  const std::uint64_t direct_end = std::min<std::uint64_t>(last, first + (1u << 20) - 1);
  if (last - first < (1u << 20)) {
    for (std::uint64_t n = first; n <= last; ++n) sum.add((*this)(static_cast<double>(n)));
    return sum.value();
  }
  const std::uint64_t head_end = std::min(direct_end, first + kDirectTerms - 1);
  for (std::uint64_t n = first; n <= head_end; ++n) sum.add((*this)(static_cast<double>(n)));
  const double u1 = std::log(static_cast<double>(head_end) + 0.5);
  const double u2 = std::log(static_cast<double>(last) + 0.5);
  sum.add(tail_mass(*this, u1, u2));
  return sum.value();
}

double PowerLogTail::power_sum(std::uint64_t first, double s) const {
  const double as = a * s;
  const double bs = b * s;
  if (as < 1.0 || (as == 1.0 && bs >= -1.0)) return kInf;
  CompensatedSum sum;
  const std::uint64_t head_end = first + kDirectTerms - 1;
  for (std::uint64_t n = first; n <= head_end; ++n) {
    sum.add(std::pow((*this)(static_cast<double>(n)), s));
  }
  const double u0 = std::log(static_cast<double>(head_end) + 0.5);
  const double cs = std::pow(C, s);
  const double c = as - 1.0;
  double rest = 0.0;
  if (c == 0.0) {
    rest = cs * std::pow(u0, bs + 1.0) / (-bs - 1.0);
  } else if (bs == 0.0) {
    rest = cs * std::exp(-c * u0) / c;
  } else {
    // v = c (u - u0): cs e^{-c u0} / c * int_0^inf (u0 + v/c)^{bs} e^{-v} dv
    auto g = [&](double v) { return std::pow(u0 + v / c, bs) * std::exp(-v); };
    boost::math::quadrature::exp_sinh<double> integrator;
    rest = cs * std::exp(-c * u0) / c * integrator.integrate(g, 0.0, kInf);
  }
  sum.add(rest);
  return sum.value();
}

SingularSequence SingularSequence::from_sorted(std::vector<double> values,
                                               std::optional<PowerLogTail> tail) {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i]) || values[i] < 0.0) {
      throw Error("SingularSequence: entry " + std::to_string(i + 1) +
                  " is negative or not finite");
    }
    if (i > 0 && values[i] > values[i - 1]) {
      throw Error("SingularSequence: entries must be nonincreasing (index " +
                  std::to_string(i + 1) + ")");
    }
  }
  if (tail) {
    if (!(tail->C > 0.0) || !(tail->a > 0.0) || !std::isfinite(tail->C) ||
        !std::isfinite(tail->a) || !std::isfinite(tail->b)) {
      throw Error("SingularSequence: tail model needs C > 0 and a > 0");
    }
    if (values.empty()) throw Error("SingularSequence: a tail model needs explicit data");
    const double last = values.back();
    const double next = (*tail)(static_cast<double>(values.size() + 1));
    if (!(std::abs(next - last) <= last)) {
      throw Error("SingularSequence: tail model does not join the data within a factor 2");
    }
  }
  SingularSequence seq;
  seq.values_ = std::move(values);
  seq.tail_ = tail;
  return seq;
}

double SingularSequence::operator[](std::uint64_t n) const {
  if (n == 0) throw Error("SingularSequence: indices are 1-based");
  if (n <= values_.size()) return values_[n - 1];
  if (tail_) return (*tail_)(static_cast<double>(n));
  return 0.0;
}

bool SingularSequence::finitely_supported() const {
  return !tail_ && (values_.empty() || values_.back() == 0.0);
}

SingularSequence SingularSequence::scaled(double c) const {
  if (!(c >= 0.0) || !std::isfinite(c)) throw Error("SingularSequence::scaled: need c >= 0");
  std::vector<double> v(values_);
  for (double& x : v) x *= c;
  std::optional<PowerLogTail> t;
  if (tail_ && c > 0.0) {
    t = *tail_;
    t->C *= c;
  }
  SingularSequence out;
  out.values_ = std::move(v);
  out.tail_ = t;
  return out;
}

std::string to_string(Membership m) {
  switch (m) {
    case Membership::Member: return "member";
    case Membership::NonMember: return "non-member";
    case Membership::Undetermined: return "undetermined";
  }
  return "?";
}

std::string to_string(TauberianStatus s) {
  switch (s) {
    case TauberianStatus::Tauberian: return "Tauberian";
    case TauberianStatus::NonTauberian: return "NonTauberian";
    case TauberianStatus::Undetermined: return "Undetermined";
  }
  return "?";
}

SingularSequence decreasing_rearrangement(std::span<const double> x) {
  std::vector<double> v(x.size());
  std::transform(x.begin(), x.end(), v.begin(), [](double a) { return std::abs(a); });
  std::stable_sort(v.begin(), v.end(), std::greater<>());
  return SingularSequence::from_sorted(std::move(v));
}

SingularSequence decreasing_rearrangement(std::span<const std::complex<double>> x) {
  std::vector<double> v(x.size());
  std::transform(x.begin(), x.end(), v.begin(),
                 [](const std::complex<double>& a) { return std::abs(a); });
  std::stable_sort(v.begin(), v.end(), std::greater<>());
  return SingularSequence::from_sorted(std::move(v));
}

LogAverageSeries log_average(const SingularSequence& x, std::span<const std::uint64_t> ks) {
  LogAverageSeries out;
  out.checkpoints.assign(ks.begin(), ks.end());
  out.alphas.reserve(ks.size());
  const auto values = x.values();
  const std::uint64_t length = values.size();
  CompensatedSum prefix;
  std::uint64_t consumed = 0;
  std::uint64_t previous = 0;
  for (const std::uint64_t k : ks) {
    if (k == 0 || k <= previous) {
      throw Error("log_average: checkpoints must be positive and strictly increasing");
    }
    previous = k;
    if (k > length && !x.tail() && !x.finitely_supported()) {
      throw Error("log_average: checkpoint k=" + std::to_string(k) +
                  " exceeds the data length " + std::to_string(length) +
                  " and there is no tail model");
    }
    const std::uint64_t explicit_end = std::min(k, length);
    for (; consumed < explicit_end; ++consumed) prefix.add(values[consumed]);
    double total = prefix.value();
    if (k > length && x.tail()) total += x.tail()->partial_sum(length + 1, k);
    out.alphas.push_back(total / std::log1p(static_cast<double>(k)));
  }
  return out;
}

double norm_1_inf(const SingularSequence& x) {
  const auto values = x.values();
  CompensatedSum prefix;
  double best = 0.0;
  for (std::size_t k = 1; k <= values.size(); ++k) {
    prefix.add(values[k - 1]);
    best = std::max(best, prefix.value() / std::log1p(static_cast<double>(k)));
  }
  if (const auto& tail = x.tail()) {
    if (tail->a < 1.0 || (tail->a == 1.0 && tail->b > 0.0)) return kInf;
    const std::uint64_t length = values.size();
    const double head = prefix.value();
    for (std::uint64_t k = 2 * length; k != 0 && k <= (std::uint64_t{1} << 62); k *= 2) {
      const double total = head + tail->partial_sum(length + 1, k);
      best = std::max(best, total / std::log1p(static_cast<double>(k)));
    }
    if (tail->a == 1.0 && tail->b == 0.0) best = std::max(best, tail->C);
  }
  return best;
}

bool submajorizes(const SingularSequence& x, const SingularSequence& y, double rel_tol) {
  const auto xv = x.values();
  const auto yv = y.values();
  const std::size_t horizon = std::max(xv.size(), yv.size());
  CompensatedSum sx, sy;
  for (std::size_t n = 0; n < horizon; ++n) {
    if (n < xv.size()) sx.add(xv[n]);
    if (n < yv.size()) sy.add(yv[n]);
    if (sy.value() > sx.value() * (1.0 + rel_tol)) return false;
  }
  return true;
}

namespace {

Membership from_bool(bool b) { return b ? Membership::Member : Membership::NonMember; }

Membership both(Membership a, Membership b) {
  if (a == Membership::NonMember || b == Membership::NonMember) return Membership::NonMember;
  if (a == Membership::Undetermined || b == Membership::Undetermined) {
    return Membership::Undetermined;
  }
  return Membership::Member;
}

void membership_from_tail(const PowerLogTail& t, std::span<const double> ps,
                          IdealMembershipReport& r) {
  const double a = t.a;
  const double b = t.b;
  r.from_tail_model = true;
  r.in_m1inf = from_bool(a > 1.0 || (a == 1.0 && b <= 0.0));

  if (a > 1.0 || (a == 1.0 && b < 0.0)) {
    r.weak_l1_witness = 0.0;
  } else if (a == 1.0 && b == 0.0) {
    r.weak_l1_witness = t.C;
  } else {
    r.weak_l1_witness = kInf;
  }
  r.in_weak_l1 = both(from_bool(std::isfinite(r.weak_l1_witness)), r.in_m1inf);

  if (a > 1.0 || (a == 1.0 && b < 1.0)) {
    r.u1inf_witness = 0.0;
  } else if (a == 1.0 && b == 1.0) {
    r.u1inf_witness = t.C;
  } else {
    r.u1inf_witness = kInf;
  }
  r.in_u1inf = both(from_bool(r.u1inf_witness == 0.0), r.in_m1inf);

  for (const double p : ps) {
    const double rate = 1.0 / p;
    r.in_weak_lp.push_back({p, from_bool(a > rate || (a == rate && b <= 0.0))});
  }
}

void membership_from_window(const SingularSequence& x, std::span<const double> ps,
                            const SequencePolicy& policy, IdealMembershipReport& r) {
  const auto v = x.values();
  const std::uint64_t length = v.size();
  const std::uint64_t begin = std::max<std::uint64_t>(16, length / 16);
  r.window_begin = begin;
  r.window_end = length;

  constexpr int kSamples = 64;
  std::vector<double> log_n, log_log_n, log_n_mu;
  double weak_witness = 0.0;
  double u_witness = 0.0;
  for (int i = 0; i <= kSamples; ++i) {
    const double frac = static_cast<double>(i) / kSamples;
    const auto n = static_cast<std::uint64_t>(
        std::llround(std::exp(std::log(double(begin)) * (1 - frac) + std::log(double(length)) * frac)));
    if (!log_n.empty() && std::log(double(n)) <= log_n.back()) continue;
    const double mu = v[n - 1];
    log_n.push_back(std::log(double(n)));
    log_log_n.push_back(std::log(std::log(double(n))));
    log_n_mu.push_back(std::log(double(n) * mu));
    weak_witness = std::max(weak_witness, double(n) * mu);
    u_witness = std::max(u_witness, double(n) * mu / std::log(double(n)));
  }
  const double decay = 1.0 - fit_line(log_n, log_n_mu).slope;  // mu_n ~ n^{-decay}
  r.window_slope = 1.0 - decay;
  const double u_slope = fit_line(log_log_n, log_n_mu).slope;  // n mu_n ~ (log n)^{u_slope}

  // Partial-sum growth S_k ~ (log k)^g over dyadic checkpoints in the window.
  std::vector<std::uint64_t> ks;
  for (const auto k : dyadic_schedule(length)) {
    if (k >= begin) ks.push_back(k);
  }
  if (ks.size() < 3) ks = {begin, (begin + length) / 2, length};
  const auto series = log_average(x, ks);
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double lk = std::log(double(ks[i]));
    const double partial = series.alphas[i] * std::log1p(double(ks[i]));
    if (partial <= 0.0) continue;
    lx.push_back(std::log(lk));
    ly.push_back(std::log(partial));
  }
  const double growth = lx.size() >= 2 ? fit_line(lx, ly).slope : 0.0;

  r.in_m1inf = from_bool(growth <= 1.0 + policy.slope_tol);
  r.weak_l1_witness = weak_witness;
  r.in_weak_l1 = both(from_bool(decay >= 1.0 - policy.slope_tol / 5.0), r.in_m1inf);
  r.u1inf_witness = u_witness;
  r.in_u1inf = both(from_bool(u_slope < 1.0 - policy.slope_tol), r.in_m1inf);
  for (const double p : ps) {
    r.in_weak_lp.push_back({p, from_bool(decay >= 1.0 / p - policy.slope_tol / 5.0)});
  }
  r.notes = "trailing-window regression over n in [" + std::to_string(begin) + ", " +
            std::to_string(length) + "], decay exponent " + format_g12(decay) +
            ", partial-sum growth exponent " + format_g12(growth);
}

std::uint64_t effective_horizon(const SingularSequence& x, const SequencePolicy& policy) {
  if (policy.horizon == 0) return x.length();
  if (policy.horizon > x.length() && !x.tail() && !x.finitely_supported()) {
    throw Error("horizon " + std::to_string(policy.horizon) +
                " exceeds the data and there is no tail model");
  }
  return policy.horizon;
}

}  // namespace

IdealMembershipReport ideal_membership(const SingularSequence& x, std::span<const double> ps,
                                       const SequencePolicy& policy) {
  IdealMembershipReport r;
  r.norm_1_inf = norm_1_inf(x);
  r.riesz_proxy = riesz_seminorm_proxy(x, policy);
  r.z1_norm = zeta_norm_z1(x, default_z1_schedule());

  if (x.finitely_supported()) {
    r.in_m1inf = r.in_weak_l1 = r.in_u1inf = Membership::Member;
    for (const double p : ps) r.in_weak_lp.push_back({p, Membership::Member});
    r.notes = "finitely supported";
    return r;
  }
  if (x.tail()) {
    membership_from_tail(*x.tail(), ps, r);
    r.notes = "evaluated on the tail model";
    return r;
  }
  if (x.length() < policy.min_length) {
    for (const double p : ps) r.in_weak_lp.push_back({p, Membership::Undetermined});
    r.notes = "length " + std::to_string(x.length()) + " below policy minimum " +
              std::to_string(policy.min_length) + " and no tail model";
    return r;
  }
  membership_from_window(x, ps, policy, r);
  return r;
}

TauberianVerdict tauberian_classify(const SingularSequence& x, const SequencePolicy& policy) {
  TauberianVerdict v;
  const std::uint64_t horizon = effective_horizon(x, policy);
  if (horizon < 1024) {
    v.diagnostics = "horizon " + std::to_string(horizon) + " < 2^10";
    return v;
  }
  const auto ks = dyadic_schedule(horizon);
  v.series = log_average(x, ks);
  const auto& alphas = v.series.alphas;
  if (std::all_of(alphas.begin(), alphas.end(), [](double a) { return a == 0.0; })) {
    v.status = TauberianStatus::Tauberian;
    v.diagnostics = "identically zero log average";
    return v;
  }
  std::vector<double> coord(ks.size());
  for (std::size_t i = 0; i < ks.size(); ++i) coord[i] = 1.0 / std::log1p(double(ks[i]));
  const auto d = analyse_series(coord, alphas, policy.fit_points);
  v.oscillation_amplitude = d.amplitude;
  v.band_width = d.band_hi - d.band_lo;
  if (!d.usable) {
    v.diagnostics = "series not usable";
    return v;
  }
  if (d.amplitude < policy.tol.conv) {
    v.status = TauberianStatus::Tauberian;
    v.limit_estimate = d.limit;
    v.limit_error = d.error;
  } else if (d.amplitude > policy.tol.osc) {
    v.status = TauberianStatus::NonTauberian;
  }
  v.diagnostics = "dyadic checkpoints 2^1..2^" + std::to_string(ks.size()) +
                  ", extrapolant variation " + format_g12(d.amplitude) +
                  ", last-third range " + format_g12(d.tail_range);
  return v;
}

std::vector<std::complex<double>> tilde_mu(const SingularSequence& t1, const SingularSequence& t2,
                                           const SingularSequence& t3,
                                           const SingularSequence& t4) {
  const std::size_t n =
      std::max({t1.length(), t2.length(), t3.length(), t4.length()});
  auto at = [](const SingularSequence& s, std::size_t i) {
    return i < s.length() ? s.values()[i] : 0.0;
  };
  std::vector<std::complex<double>> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = {at(t1, i) - at(t2, i), at(t3, i) - at(t4, i)};
  }
  return out;
}

double riesz_seminorm_proxy(const SingularSequence& x, const SequencePolicy& policy) {
  if (x.finitely_supported()) return 0.0;
  const std::uint64_t horizon = effective_horizon(x, policy);
  auto ks = dyadic_schedule(horizon, 0);
  if (ks.empty()) return 0.0;
  const auto series = log_average(x, ks);
  const std::size_t start = series.alphas.size() / 2;
  return *std::max_element(series.alphas.begin() + static_cast<std::ptrdiff_t>(start),
                           series.alphas.end());
}

double sequence_zeta(const SingularSequence& x, double s) {
  if (!(s > 0.0)) throw Error("sequence_zeta: need s > 0");
  CompensatedSum sum;
  for (const double v : x.values()) {
    if (v == 0.0) break;
    sum.add(std::pow(v, s));
  }
  if (x.tail()) {
    const double rest = x.tail()->power_sum(x.length() + 1, s);
    if (!std::isfinite(rest)) {
      throw Error("sequence_zeta: tail model diverges at s=" + format_g12(s));
    }
    sum.add(rest);
  }
  return sum.value();
}

double head_domination_ratio(const SingularSequence& x, double s) {
  if (x.tail() || x.finitely_supported()) return 0.0;
  if (!(s > 1.0)) return kInf;
  const double last = x.values().back();
  const double length = static_cast<double>(x.length());
  const double unseen = std::pow(last, s) * length / (s - 1.0);
  double head = 0.0;
  for (const double v : x.values()) head += std::pow(v, s);
  return unseen / head;
}

double zeta_norm_z1(const SingularSequence& x, std::span<const double> k_schedule) {
  std::vector<double> values;
  for (const double k : k_schedule) {
    const double s = 1.0 + 1.0 / k;
    if (head_domination_ratio(x, s) > 1e-3) continue;
    double zeta = 0.0;
    try {
      zeta = sequence_zeta(x, s);
    } catch (const Error&) {
      return kInf;
    }
    values.push_back(std::pow(zeta, k / (k + 1.0)) / k);
  }
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t start = values.size() / 2;
  return *std::max_element(values.begin() + static_cast<std::ptrdiff_t>(start), values.end());
}

std::vector<double> default_z1_schedule() {
  std::vector<double> ks;
  for (int j = 1; j <= 20; ++j) ks.push_back(std::ldexp(1.0, j));
  return ks;
}

}  // namespace dixlab
