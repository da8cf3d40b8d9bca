#include "dixlab/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>

#include "dixlab/nc_torus.hpp"

namespace dixlab {

namespace {

constexpr std::pair<ModelKind, const char*> kKindNames[] = {
    {ModelKind::harmonic, "harmonic"},   {ModelKind::oscillator, "oscillator"},
    {ModelKind::power_log, "power_log"}, {ModelKind::torus, "torus"},
    {ModelKind::nc_torus, "nc_torus"},   {ModelKind::matrix, "matrix"},
    {ModelKind::sequence_file, "sequence_file"},
};

void require_horizon(std::uint64_t horizon) {
  if (horizon == 0) throw Error("model horizon must be positive");
  if (horizon > (std::uint64_t{1} << 30)) {
    throw Error("model horizon " + std::to_string(horizon) + " exceeds 2^30 explicit terms");
  }
}

}  // namespace

std::string to_string(ModelKind k) {
  for (const auto& [kind, name] : kKindNames) {
    if (kind == k) return name;
  }
  return "unknown";
}

std::optional<ModelKind> model_kind_from_string(const std::string& name) {
  for (const auto& [kind, n] : kKindNames) {
    if (name == n) return kind;
  }
  return std::nullopt;
}

std::vector<std::string> model_kind_names() {
  std::vector<std::string> out;
  for (const auto& entry : kKindNames) out.emplace_back(entry.second);
  return out;
}

double riemann_zeta_em(double s) {
  if (!(s > 1.0)) throw Error("riemann_zeta_em: need s > 1, got " + format_g12(s));
  constexpr int N = 16;
  // B_2k / (2k)!
  constexpr double kB[] = {1.0 / 12.0,          -1.0 / 720.0,         1.0 / 30240.0,
                           -1.0 / 1209600.0,    1.0 / 47900160.0,     -691.0 / 1307674368000.0};
  CompensatedSum sum;
  for (int n = N - 1; n >= 1; --n) sum.add(std::pow(n, -s));
  const double n = N;
  sum.add(std::pow(n, 1.0 - s) / (s - 1.0));
  sum.add(0.5 * std::pow(n, -s));
  // B_2k/(2k)! * s (s+1) ... (s+2k-2) * N^{-s-2k+1}
  double rising = s;
  double power = std::pow(n, -s - 1.0);
  for (int k = 1; k <= 6; ++k) {
    sum.add(kB[k - 1] * rising * power);
    rising *= (s + 2.0 * k - 1.0) * (s + 2.0 * k);
    power /= n * n;
  }
  return sum.value();
}

double oscillator_profile(double u) {
  const double v = std::max(u, 3.0);
  return (2.0 + std::sin(std::log(std::log(v)))) / u;
}

SpectralModel harmonic_model(std::uint64_t horizon) {
  require_horizon(horizon);
  std::vector<double> v(horizon);
  for (std::uint64_t n = 1; n <= horizon; ++n) v[n - 1] = 1.0 / static_cast<double>(n);
  SpectralModel m;
  m.kind = ModelKind::harmonic;
  m.param = "horizon=" + std::to_string(horizon);
  m.sequence = SingularSequence::from_sorted(std::move(v), PowerLogTail{1.0, 1.0, 0.0});
  m.max_checkpoint = horizon;
  m.zeta = riemann_zeta_em;
  auto seq = std::make_shared<SingularSequence>(m.sequence);
  m.heat = [seq](double t, double alpha) {
    // sum_{n>=1} e^{-n/t} = 1 / (e^{1/t} - 1)
    if (alpha == 1.0) return (1.0 / t) / std::expm1(1.0 / t);
    return heat_trace(*seq, t, alpha);
  };
  return m;
}

SpectralModel oscillator_model(std::uint64_t horizon) {
  require_horizon(horizon);
  std::vector<double> v(horizon);
  for (std::uint64_t n = 1; n <= horizon; ++n) v[n - 1] = oscillator_profile(static_cast<double>(n));
  SpectralModel m;
  m.kind = ModelKind::oscillator;
  m.param = "horizon=" + std::to_string(horizon);
  m.sequence = SingularSequence::from_sorted(std::move(v));
  m.max_checkpoint = horizon;
  auto seq = std::make_shared<SingularSequence>(m.sequence);
  const std::uint64_t head = std::min<std::uint64_t>(horizon, 1u << 16);
  m.zeta = [seq, head](double s) {
    if (!(s > 1.0)) throw Error("oscillator zeta diverges at s=" + format_g12(s));
    CompensatedSum sum;
    for (std::uint64_t n = head; n >= 1; --n) sum.add(std::pow(seq->values()[n - 1], s));
    // int_{u0}^inf mu(u)^s du with u = u0 e^{w/(s-1)}:
    //   u0^{1-s}/(s-1) int_0^inf (2 + sin log log u)^s e^{-w} dw
    const double u0 = static_cast<double>(head) + 0.5;
    const double lu0 = std::log(u0);
    boost::math::quadrature::exp_sinh<double> integrator;
    auto f = [&](double w) {
      const double lu = lu0 + w / (s - 1.0);
      return std::pow(2.0 + std::sin(std::log(lu)), s) * std::exp(-w);
    };
    const double I = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
    sum.add(std::pow(u0, 1.0 - s) / (s - 1.0) * I);
    return sum.value();
  };
  m.heat = [seq](double t, double alpha) {
    CompensatedSum sum;
    bool truncated = false;
    for (const double v : seq->values()) {
      const double term = std::exp(-std::pow(t * v, -alpha));
      sum.add(term);
      if (term < 1e-18 * sum.value()) {
        truncated = true;
        break;
      }
    }
    if (!truncated) {
      const double u0 = static_cast<double>(seq->length()) + 0.5;
      boost::math::quadrature::exp_sinh<double> integrator;
      auto f = [&](double x) { return std::exp(-std::pow(t * oscillator_profile(u0 + x), -alpha)); };
      sum.add(integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity()));
    }
    return sum.value() / t;
  };
  m.notes.push_back("mu_n = (2 + sin log log max(n,3)) / n");
  return m;
}

SpectralModel power_log_model(double C, double a, double b, std::uint64_t horizon) {
  require_horizon(horizon);
  if (!(C > 0.0) || !(a > 0.0) || !std::isfinite(b)) {
    throw Error("power_log model needs C > 0, a > 0 and finite b");
  }
  const PowerLogTail tail{C, a, b};
  double n0 = 1.0;
  if (b != 0.0) n0 = std::max(2.0, std::ceil(std::exp(std::max(b, 0.0) / a)));
  std::vector<double> v(horizon);
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    v[n - 1] = tail(std::max(static_cast<double>(n), n0));
  }
  SpectralModel m;
  m.kind = ModelKind::power_log;
  m.param = "C=" + format_g12(C) + ";a=" + format_g12(a) + ";b=" + format_g12(b) +
            ";horizon=" + std::to_string(horizon);
  m.sequence = SingularSequence::from_sorted(std::move(v), tail);
  m.max_checkpoint = horizon;
  return m;
}

namespace {

SpectralModel lattice_model(ModelKind kind, int n, double cutoff, double power,
                            std::size_t budget_mb) {
  auto shells = std::make_shared<LatticeShells>(lattice_shells(n, cutoff, budget_mb));
  const double p = power > 0.0 ? power : 0.5 * n;
  SpectralModel m;
  m.kind = kind;
  m.sequence = torus_spectrum(*shells, p);
  m.max_checkpoint = m.sequence.length();
  m.zeta = [shells, p](double s) { return lattice_zeta(*shells, s, p).value; };
  m.heat = [shells, p](double t, double alpha) { return lattice_heat(*shells, t, alpha, p).value; };
  m.heat_t_max = std::max(1e3, std::min(1e6, 0.25 * static_cast<double>(shells->max_shell())));
  return m;
}

}  // namespace

SpectralModel torus_model(int n, double cutoff, double power, std::size_t budget_mb) {
  auto m = lattice_model(ModelKind::torus, n, cutoff, power, budget_mb);
  m.param = "n=" + std::to_string(n) + ";cutoff=" + format_g12(cutoff);
  if (power > 0.0) m.param += ";power=" + format_g12(power);
  return m;
}

SpectralModel nc_torus_model(double theta, double cutoff, double power, std::size_t budget_mb) {
  NCTorusElement probe(theta);  // validates theta
  auto m = lattice_model(ModelKind::nc_torus, 2, cutoff, power, budget_mb);
  m.param = "theta=" + format_g12(theta) + ";cutoff=" + format_g12(cutoff);
  if (power > 0.0) m.param += ";power=" + format_g12(power);
  m.notes.push_back("spectrum of (1 + Delta_theta)^-power does not depend on theta");
  return m;
}

SpectralModel matrix_model(const FourierMultiplier& f, int n, int M, double power,
                           std::size_t budget_mb) {
  const auto op = multiplication_matrix(f, n, M, power, budget_mb);
  // The dense eigensolve holds T, T*T and the eigenvectors at once.
  const double dim = static_cast<double>(op.points.size());
  const double bytes = 4.0 * dim * dim * sizeof(std::complex<double>);
  if (bytes > static_cast<double>(budget_mb) * 1024.0 * 1024.0) {
    throw Error("matrix model needs about " + format_g12(std::ceil(bytes / 1048576.0)) +
                " MB for the eigensolve, over the " + std::to_string(budget_mb) + " MB budget");
  }
  SpectralModel m;
  m.kind = ModelKind::matrix;
  m.param = "n=" + std::to_string(n) + ";M=" + std::to_string(M);
  m.sequence = singular_values(op.entries);
  m.max_checkpoint = op.points.size() / 4;
  m.min_horizon = 64;
  m.notes = op.warnings;
  m.notes.push_back(op.provenance);
  return m;
}

SpectralModel sequence_file_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read sequence file " + path);
  std::vector<double> values;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    std::string field;
    while (fields >> field) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(field, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != field.size() || !std::isfinite(v)) {
        throw Error(path + ":" + std::to_string(line_no) + ": not a finite number: " + field);
      }
      values.push_back(v);
    }
  }
  SpectralModel m;
  m.kind = ModelKind::sequence_file;
  m.param = "path=" + path;
  m.sequence = decreasing_rearrangement(values);
  m.max_checkpoint = m.sequence.length();
  return m;
}

TraceEstimate run_method(const SpectralModel& model, Method method, const MethodOptions& options,
                         const EstimatorPolicy& policy) {
  EstimatorPolicy pol = policy;
  switch (method) {
    case Method::dixmier_alpha: {
      pol.min_horizon = std::min(pol.min_horizon, model.min_horizon);
      std::vector<std::uint64_t> ks;
      for (const double k : options.schedule) {
        if (!(k >= 1.0) || k != std::floor(k)) {
          throw Error("dixmier schedule entries must be positive integers");
        }
        ks.push_back(static_cast<std::uint64_t>(k));
      }
      if (ks.empty()) ks = dyadic_schedule(model.max_checkpoint);
      return dixmier_estimate(model.sequence, ks, options.extrapolate, pol);
    }
    case Method::zeta_residue:
      if (model.zeta) {
        return zeta_residue_estimate(model.zeta, options.schedule, options.extrapolate, pol);
      }
      return zeta_residue_estimate(model.sequence, options.schedule, options.extrapolate, pol);
    case Method::heat_raw:
    case Method::heat_cesaro: {
      HeatEvaluator heat = model.heat;
      if (!heat) {
        auto seq = std::make_shared<SingularSequence>(model.sequence);
        heat = [seq](double t, double alpha) { return heat_trace(*seq, t, alpha); };
      }
      const auto ts = options.schedule.empty() ? default_heat_schedule(model.heat_t_max)
                                               : options.schedule;
      const auto smoothing =
          method == Method::heat_raw ? HeatSmoothing::raw : HeatSmoothing::cesaro;
      return heat_estimate(heat, ts, options.alpha, smoothing, options.extrapolate, pol);
    }
  }
  throw Error("unknown method");
}

MeasurabilityReport measurability_report(
    const SpectralModel& model, const std::vector<std::pair<Method, MethodOptions>>& methods,
    double rel_tol, const EstimatorPolicy& policy) {
  std::vector<TraceEstimate> estimates;
  for (const auto& [method, options] : methods) {
    estimates.push_back(run_method(model, method, options, policy));
  }
  return measurability_report(std::move(estimates), rel_tol, policy);
}

}  // namespace dixlab
