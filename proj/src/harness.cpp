#include "dixlab/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>
#include <thread>

#include <sys/resource.h>

#include "json.hpp"

namespace dixlab {

using nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

class Validator {
 public:
  std::vector<std::string> errors;

  void fail(const std::string& path, const std::string& message) {
    errors.push_back(path + ": " + message);
  }

  void check_keys(const ordered_json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    for (const auto& item : obj.items()) {
      const bool ok = std::any_of(allowed.begin(), allowed.end(),
                                  [&](const char* a) { return item.key() == a; });
      if (!ok) fail(join(path, item.key()), "unknown key");
    }
  }

  bool object(const ordered_json& obj, const std::string& path) {
    if (obj.is_object()) return true;
    fail(path, "must be an object");
    return false;
  }

  template <class T>
  bool number(const ordered_json& obj, const std::string& path, const char* key, T& out,
              bool required) {
    const auto it = obj.find(key);
    const std::string p = join(path, key);
    if (it == obj.end()) {
      if (required) fail(p, "required");
      return false;
    }
    if constexpr (std::is_floating_point_v<T>) {
      if (!it->is_number()) {
        fail(p, "must be a number");
        return false;
      }
      out = it->template get<T>();
      if (!std::isfinite(out)) {
        fail(p, "must be finite");
        return false;
      }
    } else if constexpr (std::is_unsigned_v<T>) {
      if (!it->is_number_unsigned()) {
        fail(p, "must be a nonnegative integer");
        return false;
      }
      out = it->template get<T>();
    } else {
      if (!it->is_number_integer()) {
        fail(p, "must be an integer");
        return false;
      }
      out = it->template get<T>();
    }
    return true;
  }

  bool boolean(const ordered_json& obj, const std::string& path, const char* key, bool& out) {
    const auto it = obj.find(key);
    if (it == obj.end()) return false;
    if (!it->is_boolean()) {
      fail(join(path, key), "must be a boolean");
      return false;
    }
    out = it->get<bool>();
    return true;
  }

  bool string(const ordered_json& obj, const std::string& path, const char* key,
              std::string& out, bool required) {
    const auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(join(path, key), "required");
      return false;
    }
    if (!it->is_string()) {
      fail(join(path, key), "must be a string");
      return false;
    }
    out = it->get<std::string>();
    return true;
  }

  static std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
  }
};

bool has_horizon(ModelKind k) {
  return k == ModelKind::harmonic || k == ModelKind::oscillator || k == ModelKind::power_log;
}

void parse_model(const ordered_json& j, ExperimentConfig& cfg, Validator& v) {
  const std::string path = "model";
  if (!v.object(j, path)) return;
  std::string kind;
  if (!v.string(j, path, "kind", kind, true)) return;
  const auto k = model_kind_from_string(kind);
  if (!k) {
    v.fail("model.kind", "unknown model kind '" + kind + "'");
    return;
  }
  ModelSpec& m = cfg.model;
  m.kind = *k;
  switch (m.kind) {
    case ModelKind::harmonic:
    case ModelKind::oscillator:
      v.check_keys(j, path, {"kind", "horizon"});
      break;
    case ModelKind::power_log:
      v.check_keys(j, path, {"kind", "horizon", "C", "a", "b"});
      if (v.number(j, path, "C", m.C, false) && !(m.C > 0.0)) v.fail("model.C", "must be > 0");
      if (v.number(j, path, "a", m.a, false) && !(m.a > 0.0)) v.fail("model.a", "must be > 0");
      v.number(j, path, "b", m.b, false);
      break;
    case ModelKind::torus:
      v.check_keys(j, path, {"kind", "n", "cutoff", "power"});
      break;
    case ModelKind::nc_torus:
      v.check_keys(j, path, {"kind", "theta", "cutoff", "power"});
      if (v.number(j, path, "theta", m.theta, false) && !(m.theta >= 0.0 && m.theta < 1.0)) {
        v.fail("model.theta", "must lie in [0, 1)");
      }
      break;
    case ModelKind::matrix:
      v.check_keys(j, path, {"kind", "n", "M", "power", "f"});
      break;
    case ModelKind::sequence_file:
      v.check_keys(j, path, {"kind", "path"});
      v.string(j, path, "path", m.path, true);
      break;
  }
  if (has_horizon(m.kind) && v.number(j, path, "horizon", m.horizon, true)) {
    if (m.horizon == 0) v.fail("model.horizon", "must be >= 1");
    if (m.horizon > cfg.max_horizon) {
      v.fail("model.horizon", "horizon " + std::to_string(m.horizon) +
                                  " is beyond the budget max_horizon " +
                                  std::to_string(cfg.max_horizon));
    }
    const double mb = 8.0 * static_cast<double>(m.horizon) / 1048576.0;
    if (mb > static_cast<double>(cfg.memory_mb)) {
      v.fail("model.horizon", "needs " + format_g12(std::ceil(mb)) + " MB, over the " +
                                  std::to_string(cfg.memory_mb) + " MB budget");
    }
  }
  if (m.kind == ModelKind::torus || m.kind == ModelKind::matrix) {
    if (v.number(j, path, "n", m.n, m.kind == ModelKind::matrix) && (m.n < 1 || m.n > 3)) {
      v.fail("model.n", "must be 1, 2 or 3");
    }
  }
  if (m.kind == ModelKind::nc_torus) m.n = 2;
  if (m.kind == ModelKind::torus || m.kind == ModelKind::nc_torus) {
    if (v.number(j, path, "cutoff", m.cutoff, true) && !(m.cutoff >= 1.0)) {
      v.fail("model.cutoff", "must be >= 1, got " + format_g12(m.cutoff));
    }
  }
  if (m.kind == ModelKind::torus || m.kind == ModelKind::nc_torus ||
      m.kind == ModelKind::matrix) {
    if (v.number(j, path, "power", m.power, false) && !(m.power > 0.0)) {
      v.fail("model.power", "must be > 0");
    }
  }
  if (m.kind == ModelKind::matrix) {
    if (v.number(j, path, "M", m.M, true) && m.M < 0) v.fail("model.M", "must be >= 0");
    const auto it = j.find("f");
    if (it == j.end() || !it->is_array() || it->empty()) {
      v.fail("model.f", "required: nonempty array of coefficients");
    } else {
      for (std::size_t i = 0; i < it->size(); ++i) {
        const std::string p = "model.f[" + std::to_string(i) + "]";
        const auto& c = (*it)[i];
        if (!v.object(c, p)) continue;
        v.check_keys(c, p, {"m", "re", "im"});
        CoefficientSpec spec;
        const auto mi = c.find("m");
        if (mi == c.end() || !mi->is_array()) {
          v.fail(p + ".m", "required: array of integers");
        } else {
          for (const auto& e : *mi) {
            if (!e.is_number_integer()) {
              v.fail(p + ".m", "entries must be integers");
              break;
            }
            spec.m.push_back(e.get<int>());
          }
          if (spec.m.size() != static_cast<std::size_t>(m.n)) {
            v.fail(p + ".m", "must have n = " + std::to_string(m.n) + " entries");
          }
        }
        v.number(c, p, "re", spec.re, false);
        v.number(c, p, "im", spec.im, false);
        m.f.push_back(spec);
      }
    }
  }
}

void parse_estimators(const ordered_json& j, ExperimentConfig& cfg, Validator& v) {
  if (!j.is_array()) {
    v.fail("estimators", "must be an array");
    return;
  }
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string p = "estimators[" + std::to_string(i) + "]";
    const auto& e = j[i];
    if (!v.object(e, p)) continue;
    v.check_keys(e, p, {"method", "schedule", "extrapolate", "alpha"});
    EstimatorSpec spec;
    std::string method;
    if (v.string(e, p, "method", method, true)) {
      if (const auto m = method_from_string(method)) {
        spec.method = *m;
      } else {
        v.fail(p + ".method", "unknown method '" + method + "'");
      }
    }
    v.boolean(e, p, "extrapolate", spec.extrapolate);
    if (v.number(e, p, "alpha", spec.alpha, false) && !(spec.alpha > 0.0)) {
      v.fail(p + ".alpha", "must be > 0");
    }
    if (const auto s = e.find("schedule"); s != e.end()) {
      if (!s->is_array()) {
        v.fail(p + ".schedule", "must be an array of numbers");
      } else {
        for (const auto& x : *s) {
          if (!x.is_number()) {
            v.fail(p + ".schedule", "entries must be numbers");
            break;
          }
          spec.schedule.push_back(x.get<double>());
        }
        for (std::size_t k = 0; k < spec.schedule.size(); ++k) {
          const double x = spec.schedule[k];
          if (!(x > 0.0) || (k > 0 && !(x > spec.schedule[k - 1]))) {
            v.fail(p + ".schedule", "must be positive and increasing");
            break;
          }
        }
        if (spec.method == Method::dixmier_alpha && !spec.schedule.empty()) {
          for (const double x : spec.schedule) {
            if (x != std::floor(x)) {
              v.fail(p + ".schedule", "Dixmier checkpoints must be integers");
              break;
            }
          }
          const double last = spec.schedule.back();
          if (has_horizon(cfg.model.kind) && last > static_cast<double>(cfg.model.horizon)) {
            v.fail(p + ".schedule", "checkpoint " + format_g12(last) +
                                        " is beyond the model horizon " +
                                        std::to_string(cfg.model.horizon));
          }
          if (last > static_cast<double>(cfg.max_horizon)) {
            v.fail(p + ".schedule", "checkpoint " + format_g12(last) +
                                        " is beyond the budget max_horizon");
          }
        }
      }
    }
    cfg.estimators.push_back(spec);
  }
}

}  // namespace

ParseResult parse_config(const std::string& text) {
  ParseResult result;
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const std::exception& e) {
    result.errors.push_back(std::string("(document): not valid JSON: ") + e.what());
    return result;
  }
  Validator v;
  if (!v.object(j, "(document)")) {
    result.errors = v.errors;
    return result;
  }
  ExperimentConfig cfg;
  v.check_keys(j, "", {"schema_version", "name", "model", "estimators", "tolerances", "output",
                       "seed", "budget"});
  if (v.number(j, "", "schema_version", cfg.schema_version, true) &&
      cfg.schema_version != kSchemaVersion) {
    v.fail("schema_version", "unsupported version " + std::to_string(cfg.schema_version) +
                                 " (expected " + std::to_string(kSchemaVersion) + ")");
  }
  v.string(j, "", "name", cfg.name, false);
  if (const auto b = j.find("budget"); b != j.end() && v.object(*b, "budget")) {
    v.check_keys(*b, "budget", {"memory_mb", "max_horizon"});
    if (v.number(*b, "budget", "memory_mb", cfg.memory_mb, false) && cfg.memory_mb == 0) {
      v.fail("budget.memory_mb", "must be >= 1");
    }
    v.number(*b, "budget", "max_horizon", cfg.max_horizon, false);
  }
  if (const auto m = j.find("model"); m != j.end()) {
    parse_model(*m, cfg, v);
  } else {
    v.fail("model", "required");
  }
  if (const auto e = j.find("estimators"); e != j.end()) parse_estimators(*e, cfg, v);
  if (const auto t = j.find("tolerances"); t != j.end() && v.object(*t, "tolerances")) {
    v.check_keys(*t, "tolerances", {"conv", "osc", "measurability"});
    v.number(*t, "tolerances", "conv", cfg.conv, false);
    v.number(*t, "tolerances", "osc", cfg.osc, false);
    v.number(*t, "tolerances", "measurability", cfg.measurability, false);
    if (!(cfg.conv > 0.0) || !(cfg.osc >= cfg.conv)) {
      v.fail("tolerances", "need 0 < conv <= osc");
    }
    if (!(cfg.measurability > 0.0)) v.fail("tolerances.measurability", "must be > 0");
  }
  if (const auto o = j.find("output"); o != j.end() && v.object(*o, "output")) {
    v.check_keys(*o, "output", {"format"});
    if (v.string(*o, "output", "format", cfg.format, false) && cfg.format != "csv" &&
        cfg.format != "json") {
      v.fail("output.format", "must be 'csv' or 'json'");
    }
  }
  v.number(j, "", "seed", cfg.seed, false);
  result.errors = std::move(v.errors);
  if (result.errors.empty()) result.config = std::move(cfg);
  return result;
}

std::string config_to_json(const ExperimentConfig& c) {
  ordered_json j;
  j["schema_version"] = c.schema_version;
  if (!c.name.empty()) j["name"] = c.name;
  ordered_json m;
  m["kind"] = to_string(c.model.kind);
  switch (c.model.kind) {
    case ModelKind::harmonic:
    case ModelKind::oscillator:
      m["horizon"] = c.model.horizon;
      break;
    case ModelKind::power_log:
      m["horizon"] = c.model.horizon;
      m["C"] = c.model.C;
      m["a"] = c.model.a;
      m["b"] = c.model.b;
      break;
    case ModelKind::torus:
      m["n"] = c.model.n;
      m["cutoff"] = c.model.cutoff;
      break;
    case ModelKind::nc_torus:
      m["theta"] = c.model.theta;
      m["cutoff"] = c.model.cutoff;
      break;
    case ModelKind::matrix: {
      m["n"] = c.model.n;
      m["M"] = c.model.M;
      ordered_json f = ordered_json::array();
      for (const auto& coef : c.model.f) {
        f.push_back({{"m", coef.m}, {"re", coef.re}, {"im", coef.im}});
      }
      m["f"] = f;
      break;
    }
    case ModelKind::sequence_file:
      m["path"] = c.model.path;
      break;
  }
  if (c.model.power > 0.0) m["power"] = c.model.power;
  j["model"] = m;
  ordered_json es = ordered_json::array();
  for (const auto& e : c.estimators) {
    ordered_json o;
    o["method"] = to_string(e.method);
    if (!e.schedule.empty()) o["schedule"] = e.schedule;
    o["extrapolate"] = e.extrapolate;
    o["alpha"] = e.alpha;
    es.push_back(o);
  }
  j["estimators"] = es;
  j["tolerances"] = {{"conv", c.conv}, {"osc", c.osc}, {"measurability", c.measurability}};
  j["output"] = {{"format", c.format}};
  j["seed"] = c.seed;
  j["budget"] = {{"memory_mb", c.memory_mb}, {"max_horizon", c.max_horizon}};
  return j.dump(2) + "\n";
}

std::uint64_t effective_budget_mb(const ExperimentConfig& config) {
  std::uint64_t budget = config.memory_mb;
  if (const char* env = std::getenv("DIXLAB_BUDGET_MB")) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) budget = std::min<std::uint64_t>(budget, v);
  }
  return budget;
}

SpectralModel build_model(const ModelSpec& spec, std::uint64_t budget_mb) {
  switch (spec.kind) {
    case ModelKind::harmonic: return harmonic_model(spec.horizon);
    case ModelKind::oscillator: return oscillator_model(spec.horizon);
    case ModelKind::power_log: return power_log_model(spec.C, spec.a, spec.b, spec.horizon);
    case ModelKind::torus: return torus_model(spec.n, spec.cutoff, spec.power, budget_mb);
    case ModelKind::nc_torus: return nc_torus_model(spec.theta, spec.cutoff, spec.power, budget_mb);
    case ModelKind::matrix: {
      FourierMultiplier f;
      f.dimension = spec.n;
      for (const auto& c : spec.f) f.coefficients[c.m] += std::complex<double>(c.re, c.im);
      return matrix_model(f, spec.n, spec.M, spec.power, budget_mb);
    }
    case ModelKind::sequence_file: return sequence_file_model(spec.path);
  }
  throw Error("unknown model kind");
}

namespace {

EstimatorPolicy policy_for(const ExperimentConfig& c) {
  EstimatorPolicy p;
  p.tol.conv = c.conv;
  p.tol.osc = c.osc;
  return p;
}

ReportRow row_from(const TraceEstimate& e, const SpectralModel& m) {
  ReportRow r;
  r.method = to_string(e.method);
  r.model = to_string(m.kind);
  r.param = m.param;
  r.value = e.value;
  r.status = to_string(e.status);
  r.oscillation = e.oscillation;
  r.extrapolated = e.extrapolated;
  r.notes = e.notes;
  return r;
}

double peak_rss_mb() {
  rusage usage{};
  getrusage(RUSAGE_SELF, &usage);
  return static_cast<double>(usage.ru_maxrss) / 1024.0;
}

bool is_budget_error(const Error& e) {
  return std::string(e.what()).find("budget") != std::string::npos;
}

}  // namespace

RunReport run_experiment(const ExperimentConfig& config, unsigned threads) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.name = config.name;
  report.seed = config.seed;
  const auto policy = policy_for(config);
  const std::string kind = to_string(config.model.kind);
  std::optional<SpectralModel> model;
  try {
    model = build_model(config.model, effective_budget_mb(config));
  } catch (const Error& e) {
    if (!is_budget_error(e)) throw;
    report.truncated = true;
    for (const auto& spec : config.estimators) {
      report.rows.push_back({to_string(spec.method), kind, "", kNaN, "Undetermined", 0.0, false,
                             std::string("truncated: ") + e.what()});
    }
    return report;
  }

  const std::size_t n = config.estimators.size();
  std::vector<TraceEstimate> estimates(n);
  std::vector<std::string> failures(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto& spec = config.estimators[i];
      try {
        estimates[i] = run_method(*model, spec.method,
                                  MethodOptions{spec.schedule, spec.extrapolate, spec.alpha},
                                  policy);
      } catch (const Error& e) {
        estimates[i].method = spec.method;
        estimates[i].value = kNaN;
        estimates[i].status = EstimateStatus::Undetermined;
        estimates[i].notes = std::string("error: ") + e.what();
      }
    }
  };
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(n)));
  std::vector<std::thread> pool;
  for (unsigned i = 1; i < workers; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  for (const auto& e : estimates) report.rows.push_back(row_from(e, *model));
  if (n >= 2) {
    const auto m = measurability_report(estimates, config.measurability, policy);
    double osc = 0.0;
    for (const auto& e : estimates) osc = std::max(osc, e.oscillation);
    report.rows.push_back({"measurability", kind, model->param, m.max_pairwise_discrepancy,
                           to_string(m.verdict), osc, false, m.notes});
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.peak_rss_mb = peak_rss_mb();
  return report;
}

SingularSequence random_unit_m1inf(CounterRng& rng, std::size_t max_length) {
  if (max_length == 0) throw Error("random_unit_m1inf: max_length must be positive");
  const std::size_t length = 1 + rng.next_index(max_length);
  const double decay = rng.next_uniform(0.3, 1.6);
  std::vector<double> raw(length);
  for (double& v : raw) v = rng.next_uniform();
  std::sort(raw.begin(), raw.end(), std::greater<>());
  for (std::size_t i = 0; i < length; ++i) {
    raw[i] *= std::pow(static_cast<double>(i + 1), -decay);
  }
  auto x = decreasing_rearrangement(raw);
  const double norm = norm_1_inf(x);
  if (norm == 0.0) return x;
  auto y = x.scaled(1.0 / norm);
  // Step below 1 if rounding pushed the rescaled norm over it.
  while (norm_1_inf(y) > 1.0) y = y.scaled(1.0 - 1e-15);
  return y;
}

RunReport run_invariant_suite(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  RunReport report;
  report.name = config.name;
  report.seed = config.seed;
  const std::string kind = to_string(config.model.kind);
  std::optional<SpectralModel> model;
  try {
    model = build_model(config.model, effective_budget_mb(config));
  } catch (const Error& e) {
    if (!is_budget_error(e)) throw;
    report.truncated = true;
    report.rows.push_back({"invariant", kind, "model", kNaN, "Undetermined", 0.0, false,
                           std::string("truncated: ") + e.what()});
    return report;
  }
  const auto policy = policy_for(config);
  const auto& x = model->sequence;
  auto add = [&](const std::string& name, double value, const std::string& status,
                 const std::string& notes) {
    report.rows.push_back({"invariant", kind, name, value, status, 0.0, false, notes});
    if (status == "fail") report.invariant_failure = true;
  };

  // alpha_k <= |x|_{1,inf}
  {
    const double norm = norm_1_inf(x);
    const auto ks = dyadic_schedule(std::max<std::uint64_t>(x.length(), 1), 0);
    double worst = 0.0;
    if (!ks.empty() && !x.empty()) {
      for (const double a : log_average(x, ks).alphas) {
        worst = std::max(worst, norm > 0.0 ? a / norm : a);
      }
    }
    add("alpha_bounded_by_norm", worst, worst <= 1.0 + 1e-12 ? "pass" : "fail",
        "max alpha_k / norm over dyadic k");
  }

  const auto base = run_method(*model, Method::dixmier_alpha, {}, policy);
  add("positivity", base.value,
      std::isnan(base.value) || base.value >= 0.0 ? "pass" : "fail", "dixmier estimate");

  {
    if (base.status != EstimateStatus::Converged) {
      add("homogeneity", kNaN, "skip", "base estimate not converged");
    } else {
      double worst = 0.0;
      auto ks = dyadic_schedule(model->max_checkpoint);
      for (const double c : {0.5, 2.0, 10.0}) {
        EstimatorPolicy pol = policy;
        pol.min_horizon = std::min(pol.min_horizon, model->min_horizon);
        const auto e = dixmier_estimate(x.scaled(c), ks, true, pol);
        const double expected = c * base.value;
        const double rel =
            expected == 0.0 ? std::abs(e.value) : std::abs(e.value - expected) / std::abs(expected);
        worst = std::max(worst, rel);
      }
      add("homogeneity", worst, worst <= 1e-6 ? "pass" : "fail",
          "relative deviation of dixmier(c x) from c dixmier(x), c in {0.5, 2, 10}");
    }
  }

  CounterRng rng(config.seed);
  {
    const std::size_t m = std::min<std::size_t>(x.length(), 4096);
    std::vector<double> prefix(x.values().begin(), x.values().begin() + static_cast<std::ptrdiff_t>(m));
    std::vector<double> shuffled = prefix;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng.next_index(i)]);
    }
    const auto once = decreasing_rearrangement(shuffled);
    const auto twice = decreasing_rearrangement(once.values());
    const bool ok = std::equal(prefix.begin(), prefix.end(), once.values().begin()) &&
                    std::equal(once.values().begin(), once.values().end(), twice.values().begin());
    add("rearrangement_idempotent", static_cast<double>(m), ok ? "pass" : "fail",
        "shuffled prefix of the model data");
  }

  {
    int failures = 0;
    for (int i = 0; i < 100; ++i) {
      const auto y = random_unit_m1inf(rng, 4096);
      std::vector<double> h(y.length());
      for (std::size_t k = 0; k < h.size(); ++k) h[k] = 1.0 / static_cast<double>(k + 1);
      if (!submajorizes(SingularSequence::from_sorted(std::move(h)), y)) ++failures;
    }
    add("harmonic_submajorization", failures, failures == 0 ? "pass" : "fail",
        "100 seeded members of the unit ball of m_{1,inf}");
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.peak_rss_mb = peak_rss_mb();
  return report;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

ordered_json json_number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return std::stod(format_g12(x));
}

}  // namespace

std::string emit_report(const RunReport& report, const std::string& format) {
  if (format == "csv") {
    std::string out = "method,model,param,value,status,oscillation,extrapolated,notes\n";
    for (const auto& r : report.rows) {
      out += csv_field(r.method) + ',' + csv_field(r.model) + ',' + csv_field(r.param) + ',' +
             format_g12(r.value) + ',' + csv_field(r.status) + ',' + format_g12(r.oscillation) +
             ',' + (r.extrapolated ? "true" : "false") + ',' + csv_field(r.notes) + '\n';
    }
    return out;
  }
  if (format == "json") {
    ordered_json j;
    j["schema_version"] = kSchemaVersion;
    j["name"] = report.name;
    j["seed"] = report.seed;
    j["truncated"] = report.truncated;
    ordered_json rows = ordered_json::array();
    for (const auto& r : report.rows) {
      rows.push_back({{"method", r.method},
                      {"model", r.model},
                      {"param", r.param},
                      {"value", json_number(r.value)},
                      {"status", r.status},
                      {"oscillation", json_number(r.oscillation)},
                      {"extrapolated", r.extrapolated},
                      {"notes", r.notes}});
    }
    j["rows"] = rows;
    return j.dump(2) + "\n";
  }
  throw Error("unknown report format '" + format + "'");
}

RunReport parse_report_json(const std::string& text) {
  const auto j = ordered_json::parse(text);
  RunReport report;
  report.name = j.at("name").get<std::string>();
  report.seed = j.at("seed").get<std::uint64_t>();
  report.truncated = j.at("truncated").get<bool>();
  auto number = [](const ordered_json& v) { return v.is_null() ? kNaN : v.get<double>(); };
  for (const auto& r : j.at("rows")) {
    report.rows.push_back({r.at("method").get<std::string>(), r.at("model").get<std::string>(),
                           r.at("param").get<std::string>(), number(r.at("value")),
                           r.at("status").get<std::string>(), number(r.at("oscillation")),
                           r.at("extrapolated").get<bool>(), r.at("notes").get<std::string>()});
    if (r.at("status") == "fail") report.invariant_failure = true;
  }
  return report;
}

int exit_code(const RunReport& report) {
  if (report.invariant_failure) return 3;
  if (report.truncated) return 2;
  for (const auto& r : report.rows) {
    if (r.status == "Undetermined") return 2;
  }
  return 0;
}

}  // namespace dixlab
