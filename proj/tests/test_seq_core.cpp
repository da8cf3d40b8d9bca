#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "dixlab/models.hpp"
#include "dixlab/seq_core.hpp"

using namespace dixlab;

namespace {

SingularSequence harmonic(std::size_t n, bool with_tail = false) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = 1.0 / double(i + 1);
  if (with_tail) return SingularSequence::from_sorted(std::move(v), PowerLogTail{1.0, 1.0, 0.0});
  return SingularSequence::from_sorted(std::move(v));
}

// H_k in long double, summed from the small end.
long double harmonic_number(std::uint64_t k) {
  long double h = 0.0L;
  for (std::uint64_t n = k; n >= 1; --n) h += 1.0L / static_cast<long double>(n);
  return h;
}

}  // namespace

TEST_CASE("decreasing_rearrangement sorts moduli") {
  const std::vector<double> a{-3.0, 1.0, 2.0};
  const auto x = decreasing_rearrangement(a);
  CHECK(std::vector<double>(x.values().begin(), x.values().end()) ==
        std::vector<double>{3.0, 2.0, 1.0});

  const std::vector<double> sorted{5.0, 4.0, 3.0};
  const auto y = decreasing_rearrangement(sorted);
  CHECK(std::equal(sorted.begin(), sorted.end(), y.values().begin()));

  const std::vector<std::complex<double>> z{{3.0, 4.0}, {0.0, -1.0}, {-6.0, 0.0}};
  const auto w = decreasing_rearrangement(z);
  CHECK(w[1] == 6.0);
  CHECK(w[2] == 5.0);
  CHECK(w[3] == 1.0);

  const auto e = decreasing_rearrangement(std::vector<double>{});
  CHECK(e.empty());
  CHECK(e.length() == 0);
}

TEST_CASE("decreasing_rearrangement matches a full-sort oracle and is idempotent") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  std::vector<double> a(1000);
  for (double& v : a) v = dist(gen);
  std::vector<double> oracle(a.size());
  std::transform(a.begin(), a.end(), oracle.begin(), [](double v) { return std::abs(v); });
  std::sort(oracle.begin(), oracle.end());
  std::reverse(oracle.begin(), oracle.end());

  const auto x = decreasing_rearrangement(a);
  CHECK(std::equal(oracle.begin(), oracle.end(), x.values().begin(), x.values().end()));
  const auto again = decreasing_rearrangement(x.values());
  CHECK(std::equal(again.values().begin(), again.values().end(), x.values().begin()));

  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(a.begin(), a.end(), gen);
    const auto p = decreasing_rearrangement(a);
    CHECK(std::equal(p.values().begin(), p.values().end(), x.values().begin()));
  }
}

TEST_CASE("SingularSequence validates its invariants") {
  CHECK_THROWS_AS(SingularSequence::from_sorted({1.0, 2.0}), Error);
  CHECK_THROWS_AS(SingularSequence::from_sorted({1.0, -0.5}), Error);
  CHECK_THROWS_AS(SingularSequence::from_sorted({1.0, NAN}), Error);
  // Junction within a factor 2: tail(3) = 1/3 against a last value of 1e-3.
  CHECK_THROWS_AS(SingularSequence::from_sorted({1.0, 1e-3}, PowerLogTail{1.0, 1.0, 0.0}), Error);
  CHECK_THROWS_AS(SingularSequence::from_sorted({1.0, 0.5}, PowerLogTail{-1.0, 1.0, 0.0}), Error);
  CHECK_NOTHROW(SingularSequence::from_sorted({1.0, 1.0, 0.0, 0.0}));
  const auto x = harmonic(4, true);
  CHECK(x[2] == doctest::Approx(0.5));
  CHECK(x[10] == doctest::Approx(0.1));
}

TEST_CASE("log_average against direct summation") {
  const auto x = harmonic(1000);
  const std::vector<std::uint64_t> ks{1, 10, 100, 1000};
  const auto series = log_average(x, ks);
  REQUIRE(series.alphas.size() == 4);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    const double oracle = double(harmonic_number(ks[i]) / std::log(1.0L + ks[i]));
    CHECK(series.alphas[i] == doctest::Approx(oracle).epsilon(1e-13));
  }
  CHECK(series.alphas[2] == doctest::Approx(1.12399).epsilon(1e-5));

  const auto zero = SingularSequence::from_sorted(std::vector<double>(50, 0.0));
  for (const double a : log_average(zero, std::vector<std::uint64_t>{1, 7, 50}).alphas) {
    CHECK(a == 0.0);
  }

  std::vector<double> e1(64, 0.0);
  e1[0] = 1.0;
  const auto one = SingularSequence::from_sorted(e1);
  const auto s1 = log_average(one, std::vector<std::uint64_t>{3, 63});
  CHECK(s1.alphas[0] == doctest::Approx(1.0 / std::log(4.0)).epsilon(1e-15));
  CHECK(s1.alphas[1] == doctest::Approx(1.0 / std::log(64.0)).epsilon(1e-15));
}

TEST_CASE("log_average beyond the data needs a tail") {
  const auto x = harmonic(100);
  try {
    log_average(x, std::vector<std::uint64_t>{10, 500});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("500") != std::string::npos);
  }
  const auto tailed = harmonic(100, true);
  const auto s = log_average(tailed, std::vector<std::uint64_t>{5000});
  const double oracle = double(harmonic_number(5000) / std::log(5001.0L));
  CHECK(s.alphas[0] == doctest::Approx(oracle).epsilon(1e-9));
}

TEST_CASE("norm_1_inf by exhaustive scan") {
  const auto x = harmonic(5000);
  double scan = 0.0;
  long double sum = 0.0L;
  for (std::uint64_t k = 1; k <= 5000; ++k) {
    sum += 1.0L / k;
    scan = std::max(scan, double(sum / std::log(1.0L + k)));
  }
  CHECK(norm_1_inf(x) == doctest::Approx(scan).epsilon(1e-14));
  CHECK(norm_1_inf(x) == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-14));

  CHECK(norm_1_inf(SingularSequence::from_sorted(std::vector<double>(10, 0.0))) == 0.0);
  CHECK(norm_1_inf(SingularSequence::from_sorted({1.0, 0.0, 0.0})) ==
        doctest::Approx(1.0 / std::log(2.0)));
}

TEST_CASE("alpha_k never exceeds the norm") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(2000);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = dist(gen) / std::sqrt(double(i + 1));
    const auto x = decreasing_rearrangement(a);
    std::vector<std::uint64_t> ks(a.size());
    std::iota(ks.begin(), ks.end(), 1);
    const double norm = norm_1_inf(x);
    for (const double alpha : log_average(x, ks).alphas) CHECK(alpha <= norm);
  }
}

TEST_CASE("submajorization") {
  const auto h = harmonic(100);
  CHECK(submajorizes(h, h));
  CHECK_FALSE(submajorizes(SingularSequence::from_sorted({1.0, 0.0}),
                           SingularSequence::from_sorted({0.6, 0.6})));
  CHECK_FALSE(submajorizes(SingularSequence::from_sorted({0.6, 0.6}),
                           SingularSequence::from_sorted({1.0})));
  CHECK(submajorizes(SingularSequence::from_sorted({0.6, 0.6}),
                     SingularSequence::from_sorted({0.6, 0.4, 0.2})));

  // Partial sums of a unit-norm y stay below log(1+k) <= H_k.
  std::mt19937_64 gen(17);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> a(300);
    for (std::size_t i = 0; i < a.size(); ++i) a[i] = dist(gen) / double(i + 1);
    auto y = decreasing_rearrangement(a);
    y = y.scaled(1.0 / norm_1_inf(y));
    if (norm_1_inf(y) > 1.0) y = y.scaled(1.0 - 1e-15);
    CHECK(submajorizes(harmonic(300), y));
  }
}

TEST_CASE("partial sums are subadditive under rearrangement") {
  std::mt19937_64 gen(23);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(500), b(500), c(500);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = dist(gen);
      b[i] = dist(gen) * dist(gen);
      c[i] = a[i] + b[i];
    }
    const auto xa = decreasing_rearrangement(a);
    const auto xb = decreasing_rearrangement(b);
    const auto xc = decreasing_rearrangement(c);
    double sa = 0.0, sb = 0.0, sc = 0.0;
    for (std::size_t n = 1; n <= a.size(); ++n) {
      sa += xa[n];
      sb += xb[n];
      sc += xc[n];
      CHECK(sc <= (sa + sb) * (1.0 + 1e-12));
    }
  }
}

TEST_CASE("ideal membership") {
  const auto h = harmonic(1 << 16, true);
  const std::vector<double> ps{1.0, 2.0};
  const auto r = ideal_membership(h, ps);
  CHECK(r.in_weak_l1 == Membership::Member);
  CHECK(r.weak_l1_witness == doctest::Approx(1.0));
  CHECK(r.in_u1inf == Membership::Member);
  CHECK(r.in_m1inf == Membership::Member);
  CHECK(r.from_tail_model);

  std::vector<double> v(1 << 16);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / std::sqrt(double(i + 1));
  const auto root = SingularSequence::from_sorted(v, PowerLogTail{1.0, 0.5, 0.0});
  const auto rr = ideal_membership(root, ps);
  CHECK(rr.in_m1inf == Membership::NonMember);
  REQUIRE(rr.in_weak_lp.size() == 2);
  CHECK(rr.in_weak_lp[1].member == Membership::Member);
  CHECK(rr.in_weak_lp[0].member == Membership::NonMember);

  // Same data without a tail: decided from the trailing window.
  const auto root_window = SingularSequence::from_sorted(v);
  const auto rw = ideal_membership(root_window, ps);
  CHECK(rw.in_m1inf == Membership::NonMember);
  CHECK(rw.window_end > rw.window_begin);

  const auto zero = SingularSequence::from_sorted(std::vector<double>(10, 0.0));
  const auto rz = ideal_membership(zero, ps);
  CHECK(rz.in_m1inf == Membership::Member);
  CHECK(rz.in_weak_l1 == Membership::Member);
  CHECK(rz.in_u1inf == Membership::Member);

  // Short data with no tail cannot be judged.
  const auto short_seq = SingularSequence::from_sorted({1.0, 0.5, 0.25});
  const auto rs = ideal_membership(short_seq, ps);
  CHECK(rs.in_m1inf == Membership::Undetermined);
}

TEST_CASE("membership implications hold on a mixed family") {
  const std::vector<double> ps{1.0};
  for (const double b : {-1.0, 0.0, 0.5, 1.0}) {
    const auto m = power_log_model(1.0, 1.0, b, 1 << 16);
    const auto r = ideal_membership(m.sequence, ps);
    if (r.in_u1inf == Membership::Member) CHECK(r.in_m1inf == Membership::Member);
    if (r.in_weak_l1 == Membership::Member) CHECK(r.in_m1inf == Membership::Member);
  }
}

TEST_CASE("Tauberian classification") {
  const auto h = harmonic_model(1 << 20);
  const auto v = tauberian_classify(h.sequence);
  CHECK(v.status == TauberianStatus::Tauberian);
  CHECK(v.limit_estimate == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(v.oscillation_amplitude <= 1e-2);

  const auto osc = oscillator_model(10'000'000);
  const auto vo = tauberian_classify(osc.sequence);
  CHECK(vo.status == TauberianStatus::NonTauberian);
  CHECK(vo.band_width >= 0.15);

  const auto zero = SingularSequence::from_sorted(std::vector<double>(4096, 0.0));
  const auto vz = tauberian_classify(zero);
  CHECK(vz.status == TauberianStatus::Tauberian);
  CHECK(vz.limit_estimate == 0.0);

  const auto short_seq = harmonic(500);
  CHECK(tauberian_classify(short_seq).status == TauberianStatus::Undetermined);
}

TEST_CASE("tilde_mu") {
  const auto a = SingularSequence::from_sorted({3.0, 2.0, 1.0});
  const auto b = SingularSequence::from_sorted({1.0});
  const SingularSequence none;
  const auto only = tilde_mu(a, none, none, none);
  REQUIRE(only.size() == 3);
  CHECK(only[0] == std::complex<double>(3.0, 0.0));
  CHECK(only[2] == std::complex<double>(1.0, 0.0));
  for (const auto& z : tilde_mu(a, a, b, b)) CHECK(z == std::complex<double>(0.0, 0.0));
  const auto mixed = tilde_mu(a, b, b, none);
  CHECK(mixed[0] == std::complex<double>(2.0, 1.0));
  CHECK(mixed[1] == std::complex<double>(2.0, 0.0));
}

TEST_CASE("Riesz proxy and zeta norm") {
  std::vector<double> finite(2048, 0.0);
  for (int i = 0; i < 10; ++i) finite[i] = 1.0 / (i + 1);
  CHECK(riesz_seminorm_proxy(SingularSequence::from_sorted(finite)) == 0.0);

  const auto h = harmonic_model(1 << 20);
  const double proxy = riesz_seminorm_proxy(h.sequence);
  CHECK(proxy == doctest::Approx(1.0).epsilon(0.06));
  const double z1 = zeta_norm_z1(h.sequence, default_z1_schedule());
  CHECK(z1 == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(std::exp(-1.0) * proxy <= z1);
  CHECK(z1 <= norm_1_inf(h.sequence));

  // Dyadic-sampling oracle: max of alpha over k = 2^12 .. 2^24. Asymptotically
  // 2 + sqrt(2)/2, reached only at a 1/log N rate from above.
  const auto osc = oscillator_model(1 << 24);
  long double sum = 0.0L;
  double oracle = 0.0;
  for (std::uint64_t n = 1; n <= (1u << 24); ++n) {
    const double u = std::max<double>(n, 3.0);
    sum += (2.0L + std::sin(std::log(std::log(u)))) / n;
    if ((n & (n - 1)) == 0 && n >= (1u << 12)) {
      oracle = std::max(oracle, double(sum / std::log(1.0L + n)));
    }
  }
  const double osc_proxy = riesz_seminorm_proxy(osc.sequence);
  CHECK(osc_proxy == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(osc_proxy > 2.0 + std::sqrt(0.5));
  CHECK(osc_proxy < 2.0 + std::sqrt(0.5) + 3.0 / std::log(double(1 << 12)));

  CHECK(zeta_norm_z1(SingularSequence::from_sorted(std::vector<double>(100, 0.0)),
                     default_z1_schedule()) == 0.0);
}

TEST_CASE("sequence_zeta with the tail matches the Riemann zeta") {
  const auto h = harmonic(1000, true);
  for (const double s : {1.5, 2.0, 3.0}) {
    CHECK(sequence_zeta(h, s) == doctest::Approx(riemann_zeta_em(s)).epsilon(1e-9));
  }
  CHECK_THROWS_AS(sequence_zeta(h, 1.0), Error);
}
