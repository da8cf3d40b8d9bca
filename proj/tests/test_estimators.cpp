#include <cmath>
#include <random>

#include <boost/math/special_functions/zeta.hpp>

#include "doctest.h"
#include "dixlab/estimators.hpp"
#include "dixlab/models.hpp"

using namespace dixlab;

namespace {

constexpr double kEulerGamma = 0.57721566490153286;

SingularSequence zero_sequence(std::size_t n) {
  return SingularSequence::from_sorted(std::vector<double>(n, 0.0));
}

std::vector<double> large_k_schedule() {
  std::vector<double> ks;
  for (double k = 1e5; k <= 1e6 + 1; k += 1e5) ks.push_back(k);
  return ks;
}

}  // namespace

TEST_CASE("Dixmier estimate") {
  const auto h = harmonic_model(1'000'000);
  const auto e = dixmier_estimate(h.sequence);
  CHECK(e.status == EstimateStatus::Converged);
  CHECK(e.extrapolated);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(e.oscillation <= 1e-2);

  const auto z = dixmier_estimate(zero_sequence(4096));
  CHECK(z.status == EstimateStatus::Converged);
  CHECK(z.value == 0.0);

  const auto t = torus_model(2, 500.0);
  const auto te = run_method(t, Method::dixmier_alpha);
  CHECK(te.status == EstimateStatus::Converged);
  CHECK(te.value == doctest::Approx(M_PI).epsilon(1e-2));

  // Too short to say anything.
  const auto s = dixmier_estimate(harmonic_model(600).sequence);
  CHECK(s.status == EstimateStatus::Undetermined);
  CHECK(std::isnan(s.value));
}

TEST_CASE("zeta residue estimate") {
  // Euler-Maclaurin evaluator against Boost's zeta.
  for (const double s : {1.005, 1.01, 1.1, 2.0, 4.0}) {
    CHECK(riemann_zeta_em(s) == doctest::Approx(boost::math::zeta(s)).epsilon(1e-13));
  }
  const double at100 = 0.01 * riemann_zeta_em(1.01);
  CHECK(at100 == doctest::Approx(1.0 + kEulerGamma * 0.01).epsilon(1e-4));
  CHECK(at100 == doctest::Approx(1.00577).epsilon(1e-5));

  const auto e = zeta_residue_estimate(riemann_zeta_em);
  CHECK(e.status == EstimateStatus::Converged);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-4));

  std::vector<double> finite(100, 0.0);
  for (int i = 0; i < 10; ++i) finite[i] = 1.0 / (1 + i);
  const auto f = zeta_residue_estimate(SingularSequence::from_sorted(finite));
  CHECK(f.status == EstimateStatus::Converged);
  // The k <= 200 extrapolant keeps an O(1/k^2) remainder; the error bar covers it.
  CHECK(std::abs(f.value) <= f.error);
  CHECK(std::abs(f.value) < 1e-3);
  const auto ff = zeta_residue_estimate(SingularSequence::from_sorted(finite), large_k_schedule());
  CHECK(std::abs(ff.value) < 1e-9);

  const auto t = torus_model(2, 500.0);
  const auto te = run_method(t, Method::zeta_residue);
  CHECK(te.status == EstimateStatus::Converged);
  CHECK(te.value == doctest::Approx(M_PI).epsilon(1e-3));

  // Harmonic data with no tail cannot be summed near s = 1.
  std::vector<double> hv(5000);
  for (int i = 0; i < 5000; ++i) hv[i] = 1.0 / (i + 1);
  const auto u = zeta_residue_estimate(SingularSequence::from_sorted(hv));
  CHECK(u.status == EstimateStatus::Undetermined);

  const ZetaEvaluator bad = [](double s) -> double {
    if (s < 1.02) throw Error("divergent");
    return 1.0;
  };
  try {
    zeta_residue_estimate(bad);
    FAIL("expected an error");
  } catch (const Error& err) {
    CHECK(std::string(err.what()).find("s=1.01") != std::string::npos);
  }
}

TEST_CASE("heat trace") {
  const auto h = harmonic_model(1 << 20);
  const double t = 1e3;
  const double closed = (1.0 / t) / std::expm1(1.0 / t);
  CHECK(closed == doctest::Approx(0.9995001).epsilon(1e-7));
  CHECK(heat_trace(h.sequence, t, 1.0) == doctest::Approx(closed).epsilon(1e-9));
  CHECK(h.heat(t, 1.0) == doctest::Approx(closed).epsilon(1e-15));

  // mu_n = n^-2: sum e^{-n^2/t} ~ (sqrt(pi t) - 1) / 2.
  const auto sq = power_log_model(1.0, 2.0, 0.0, 1 << 16);
  for (const double tt : {1e2, 1e4}) {
    const double oracle = 0.5 * (std::sqrt(M_PI * tt) - 1.0) / tt;
    CHECK(heat_trace(sq.sequence, tt, 1.0) == doctest::Approx(oracle).epsilon(1e-9));
  }
  CHECK(heat_trace(zero_sequence(100), 10.0, 1.0) == 0.0);
}

TEST_CASE("heat estimate") {
  const auto h = harmonic_model(1 << 20);
  const auto raw = heat_estimate(h.heat, default_heat_schedule(1e4), 1.0, HeatSmoothing::raw, false);
  CHECK(raw.status == EstimateStatus::Converged);
  CHECK(raw.value == doctest::Approx(0.99995).epsilon(1e-6));
  const auto ex = heat_estimate(h.heat, {}, 1.0, HeatSmoothing::raw);
  CHECK(ex.value == doctest::Approx(1.0).epsilon(1e-4));

  const auto ces = heat_estimate(h.heat, {}, 1.0, HeatSmoothing::cesaro);
  CHECK(ces.status == EstimateStatus::Converged);
  CHECK(ces.value == doctest::Approx(1.0).epsilon(1e-3));

  // alpha = 2 normalizes by Gamma(3/2).
  const auto a2 = heat_estimate([&](double t, double a) { return heat_trace(h.sequence, t, a); },
                                {}, 2.0, HeatSmoothing::raw);
  CHECK(a2.value == doctest::Approx(1.0).epsilon(1e-3));

  const auto zero = heat_estimate([](double, double) { return 0.0; }, {}, 1.0, HeatSmoothing::raw);
  CHECK(zero.value == 0.0);

  // T^2 at t = 10^6 with the tail correction, far beyond the explicit shells.
  const auto shells = lattice_shells(2, 300.0);
  CHECK(lattice_heat(shells, 1e6, 1.0).value == doctest::Approx(M_PI).epsilon(1e-3));

  EstimatorPolicy strict;
  strict.quadrature_tol = 1e-14;
  const auto fail = heat_estimate(h.heat, {}, 1.0, HeatSmoothing::cesaro, true, strict);
  CHECK(fail.status == EstimateStatus::Undetermined);
}

TEST_CASE("measurability reports") {
  const auto h = harmonic_model(1 << 20);
  const std::vector<std::pair<Method, MethodOptions>> methods{
      {Method::dixmier_alpha, {}}, {Method::zeta_residue, {}}, {Method::heat_raw, {}}};
  const auto rh = measurability_report(h, methods);
  CHECK(rh.verdict == Verdict::Measurable);
  for (const auto& e : rh.estimates) CHECK(e.value == doctest::Approx(1.0).epsilon(1e-3));

  const auto osc = oscillator_model(1 << 23);
  const auto ro = measurability_report(osc, methods);
  CHECK(ro.verdict == Verdict::NotMeasurable);

  const auto t = torus_model(2, 500.0);
  const auto rt = measurability_report(t, methods);
  CHECK(rt.verdict == Verdict::Measurable);
  for (const auto& e : rt.estimates) CHECK(e.value == doctest::Approx(M_PI).epsilon(1e-2));

  CHECK_THROWS_AS(measurability_report(h, {{Method::dixmier_alpha, {}}}), Error);
}

TEST_CASE("product zeta sequences") {
  const auto shells = lattice_shells(2, 500.0);
  const auto one = product_zeta_sequence(FourierMultiplier::constant(2, 1.0), shells, 1.0);
  const auto plain = zeta_residue_estimate(
      [&](double s) { return lattice_zeta(shells, s).value; });
  CHECK(one.value == doctest::Approx(plain.value).epsilon(1e-14));
  CHECK(one.value == doctest::Approx(M_PI).epsilon(1e-3));

  FourierMultiplier f;
  f.dimension = 2;
  f.coefficients[{0, 0}] = 1.75;
  f.coefficients[{1, 0}] = std::complex<double>(0.2, 0.1);
  f.coefficients[{-1, 0}] = std::complex<double>(0.2, -0.1);
  const auto tf = product_zeta_sequence(f, shells, 1.0);
  CHECK(tf.value == doctest::Approx(1.75 * M_PI).epsilon(1e-3));

  const auto even = product_zeta_sequence(SublatticeProjection{2}, shells, 1.0);
  CHECK(even.value == doctest::Approx(M_PI / 4).epsilon(1e-3));
  // Independent count at k = 50: brute force over the even sublattice inside
  // radius 500, plus the continuum tail (pi/4) (1 + R^2)^{1-s} / (s - 1).
  const double k = 50.0, s = 1.0 + 1.0 / k;
  long double brute = 0.0L;
  for (long a = -500; a <= 500; a += 2)
    for (long b = -500; b <= 500; b += 2)
      if (a * a + b * b <= 250000) brute += std::pow(1.0L + a * a + b * b, -(long double)s);
  const double tail = M_PI / 4.0 * std::pow(1.0 + 250000.0, 1.0 - s) / (s - 1.0);
  REQUIRE(even.raw_series.size() >= 5);
  CHECK(even.raw_series[4].checkpoint == 50.0);
  CHECK(even.raw_series[4].value == doctest::Approx((double(brute) + tail) / k).epsilon(2e-3));

  CHECK_THROWS_AS(product_zeta_sequence(Eigen::MatrixXcd::Identity(3, 3), shells, 1.0), Error);
}

TEST_CASE("diagonal helpers") {
  const auto h = harmonic_model(1 << 12).sequence;
  const auto r = diagonal_power(h, 0.5);
  CHECK(r[4] == doctest::Approx(0.5));
  CHECK(r.tail().has_value());
  const auto back = diagonal_product(r, r);
  for (int n = 1; n < 5000; n += 97) CHECK(back[n] == doctest::Approx(h[n]).epsilon(1e-14));
}

TEST_CASE("Hoelder check") {
  const auto h = harmonic_model(1 << 20).sequence;
  const auto root = diagonal_power(h, 0.5);
  const auto r1 = holder_check(root, root, 2.0);
  REQUIRE(r1.holds.has_value());
  CHECK(*r1.holds);
  CHECK(r1.mode == HolderMode::converged);
  CHECK(std::abs(r1.slack) < 1e-3);

  const auto t = torus_model(2, 300.0).sequence;
  const auto troot = diagonal_power(t, 0.5);
  const auto r2 = holder_check(troot, troot, 2.0);
  REQUIRE(r2.holds.has_value());
  CHECK(*r2.holds);
  CHECK(std::abs(r2.slack) < 1e-2);

  const auto osc = oscillator_model(1 << 22).sequence;
  const auto oroot = diagonal_power(osc, 0.5);
  const auto r3 = holder_check(oroot, oroot, 2.0);
  REQUIRE(r3.holds.has_value());
  CHECK(*r3.holds);
  CHECK(r3.mode == HolderMode::per_checkpoint);
  CHECK(r3.slack >= -1e-12);

  // Too short for any estimate: no verdict.
  const auto shortseq = SingularSequence::from_sorted(std::vector<double>(32, 0.5));
  const auto r5 = holder_check(shortseq, shortseq, 2.0);
  CHECK_FALSE(r5.holds.has_value());
  CHECK(r5.notes.find("undetermined") != std::string::npos);

  CHECK_THROWS_AS(holder_check(root, root, 1.0), Error);
}

TEST_CASE("Mellin check") {
  const auto single = mellin_check(mellin_single(1.0), 2.0);
  REQUIRE(single.passed.has_value());
  CHECK(*single.passed);
  CHECK(single.expected == doctest::Approx(1.0));

  const auto squares = mellin_check(mellin_squares(2000), 1.0);
  REQUIRE(squares.passed.has_value());
  CHECK(*squares.passed);
  CHECK(squares.expected == doctest::Approx(M_PI * M_PI / 6).epsilon(1e-9));
  CHECK(squares.relative_error <= 1e-6);

  const auto torus = mellin_check(mellin_torus(lattice_shells(2, 200.0)), 2.0);
  REQUIRE(torus.passed.has_value());
  CHECK(*torus.passed);
  CHECK(torus.relative_error <= 1e-6);

  CHECK_THROWS_AS(mellin_check(mellin_squares(100), 0.4), Error);
}

TEST_CASE("positivity and homogeneity") {
  const auto h = harmonic_model(1 << 20);
  const auto p = power_log_model(2.0, 1.0, 0.0, 1 << 20);
  for (const auto* m : {&h, &p}) {
    const auto d = run_method(*m, Method::dixmier_alpha);
    const auto z = run_method(*m, Method::zeta_residue, MethodOptions{large_k_schedule(), true, 1.0});
    const auto r = run_method(*m, Method::heat_raw);
    for (const auto* e : {&d, &z, &r}) {
      REQUIRE(e->status == EstimateStatus::Converged);
      CHECK(e->value >= 0.0);
    }
    for (const double c : {0.5, 2.0, 10.0}) {
      const auto xs = m->sequence.scaled(c);
      const auto dc = dixmier_estimate(xs);
      CHECK(dc.value == doctest::Approx(c * d.value).epsilon(1e-6));
      const auto zc = zeta_residue_estimate(xs, large_k_schedule());
      CHECK(zc.value == doctest::Approx(c * z.value).epsilon(1e-6));
      const auto rc = heat_estimate([&](double t, double a) { return heat_trace(xs, t, a); }, {},
                                    1.0, HeatSmoothing::raw);
      CHECK(rc.value == doctest::Approx(c * r.value).epsilon(1e-6));
    }
  }
}

TEST_CASE("finite-rank changes do not move the Dixmier value") {
  std::vector<double> v(1'000'000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / double(i + 1);
  const auto base = dixmier_estimate(SingularSequence::from_sorted(v));
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = i < 100 ? 100.0 : v[i];
  const auto bumped = dixmier_estimate(SingularSequence::from_sorted(w));
  CHECK(std::abs(bumped.value - base.value) < 1e-3);
}

TEST_CASE("cross-method agreement on Tauberian models") {
  std::vector<SpectralModel> family;
  family.push_back(harmonic_model(1 << 20));
  family.push_back(power_log_model(2.0, 1.0, 0.0, 1 << 20));
  family.push_back(torus_model(2, 500.0));
  for (const auto& m : family) {
    const auto d = run_method(m, Method::dixmier_alpha);
    const auto z = run_method(m, Method::zeta_residue);
    const auto r = run_method(m, Method::heat_raw);
    CAPTURE(m.param);
    CHECK(std::abs(d.value - z.value) <= 2.0 * (d.error + z.error));
    CHECK(std::abs(d.value - r.value) <= 2.0 * (d.error + r.error));
  }
}

TEST_CASE("raw alpha is monotone in the data") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(4096), y(4096);
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = u(gen) / double(i + 1);
    y[i] = x[i] + u(gen) / double(i + 1);
  }
  const auto xs = decreasing_rearrangement(x);
  const auto ys = decreasing_rearrangement(y);
  // Pointwise x <= y survives sorting both.
  const auto ks = dyadic_schedule(4096, 0);
  const auto ax = log_average(xs, ks).alphas;
  const auto ay = log_average(ys, ks).alphas;
  for (std::size_t i = 0; i < ks.size(); ++i) CHECK(ax[i] <= ay[i]);
}
