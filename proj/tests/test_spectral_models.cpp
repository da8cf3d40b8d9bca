#include <cmath>
#include <map>
#include <random>

#include <Eigen/QR>

#include "doctest.h"
#include "dixlab/seq_core.hpp"
#include "dixlab/spectral_models.hpp"

using namespace dixlab;
using Eigen::MatrixXcd;
using cd = std::complex<double>;

namespace {

MatrixXcd random_matrix(std::mt19937_64& gen, int n) {
  std::normal_distribution<double> dist;
  MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cd(dist(gen), dist(gen));
  return a;
}

MatrixXcd random_unitary(std::mt19937_64& gen, int n) {
  Eigen::HouseholderQR<MatrixXcd> qr(random_matrix(gen, n));
  return qr.householderQ() * MatrixXcd::Identity(n, n);
}

// Brute-force sum of (1 + |m|^2)^{-e} over |m|^2 <= R2 on Z^2.
double brute_zeta2(long R2, double e) {
  const long r = static_cast<long>(std::sqrt(double(R2))) + 1;
  long double sum = 0.0L;
  for (long a = -r; a <= r; ++a)
    for (long b = -r; b <= r; ++b)
      if (a * a + b * b <= R2) sum += std::pow(1.0L + a * a + b * b, -(long double)e);
  return double(sum);
}

}  // namespace

TEST_CASE("torus_spectrum small cases") {
  const auto x = torus_spectrum(1, 1.0);
  REQUIRE(x.length() == 3);
  CHECK(x[1] == 1.0);
  CHECK(x[2] == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-15));
  CHECK(x[3] == doctest::Approx(std::pow(2.0, -0.5)).epsilon(1e-15));
  for (const int n : {1, 2, 3}) CHECK(torus_spectrum(n, 5.0)[1] == 1.0);
  CHECK_THROWS_AS(torus_spectrum(2, 0.5), Error);
  CHECK_THROWS_AS(torus_spectrum(4, 2.0), Error);
}

TEST_CASE("lattice counts against brute force") {
  const auto shells = lattice_shells(2, 50.0);
  long count = 0;
  std::map<long, long> per_shell;
  for (long a = -50; a <= 50; ++a)
    for (long b = -50; b <= 50; ++b)
      if (a * a + b * b <= 2500) {
        ++count;
        ++per_shell[a * a + b * b];
      }
  CHECK(shells.total() == std::uint64_t(count));
  CHECK(torus_spectrum(2, 50.0).length() == std::size_t(count));
  for (const auto& [j, c] : per_shell) CHECK(shells.counts[j] == std::uint64_t(c));
  CHECK(shells.counts[1] == 4);
  CHECK(shells.counts[3] == 0);
  CHECK(shells.counts[25] == 12);

  const auto s3 = lattice_shells(3, 6.0);
  long c3 = 0;
  for (long a = -6; a <= 6; ++a)
    for (long b = -6; b <= 6; ++b)
      for (long c = -6; c <= 6; ++c) c3 += (a * a + b * b + c * c <= 36);
  CHECK(s3.total() == std::uint64_t(c3));
  CHECK(s3.counts[1] == 6);
  CHECK(s3.counts[2] == 12);
  CHECK(s3.counts[3] == 8);
}

TEST_CASE("lattice enumeration respects the budget") {
  try {
    lattice_shells(1, 1e7, 1);
    FAIL("expected a budget error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("MB") != std::string::npos);
  }
}

TEST_CASE("lattice_zeta") {
  const auto shells = lattice_shells(2, 40.0);
  const auto z = lattice_zeta(shells, 2.0);
  // Explicit part against a brute-force double sum at the same cutoff.
  CHECK(z.value - z.tail == doctest::Approx(brute_zeta2(1600, 2.0)).epsilon(1e-12));
  // Tail-corrected value against a much larger brute force, whose own
  // remainder is about pi / 400^2.
  CHECK(z.value == doctest::Approx(brute_zeta2(400 * 400, 2.0) + M_PI / (400.0 * 400.0))
                       .epsilon(1e-6));
  CHECK(z.tail > 0.0);

  double prev = INFINITY;
  for (const double s : {1.05, 1.2, 1.5, 2.0, 3.0}) {
    const double v = lattice_zeta(shells, s).value;
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS_AS(lattice_zeta(shells, 1.0), Error);

  const auto big = lattice_shells(2, 1000.0);
  for (const double k : {100.0, 1000.0}) {
    const double r = lattice_zeta(big, 1.0 + 1.0 / k).value / k;
    CHECK(r == doctest::Approx(M_PI).epsilon(2.0 / k));
  }

  // n = 3 with the default power 3/2: the tail-corrected sum at two cutoffs.
  const double z3a = lattice_zeta(3, 1.5, 20.0).value;
  const double z3b = lattice_zeta(3, 1.5, 60.0).value;
  CHECK(z3a == doctest::Approx(z3b).epsilon(1e-3));
}

TEST_CASE("lattice_heat against a Gaussian sum") {
  const auto shells = lattice_shells(2, 200.0);
  const double t = 500.0;
  long double brute = 0.0L;
  for (long a = -400; a <= 400; ++a)
    for (long b = -400; b <= 400; ++b) brute += std::exp(-(1.0L + a * a + b * b) / t);
  const auto h = lattice_heat(shells, t, 1.0);
  CHECK(h.value == doctest::Approx(double(brute) / t).epsilon(1e-8));
  CHECK(h.value == doctest::Approx(M_PI).epsilon(1e-2));
}

TEST_CASE("multiplication_matrix entries") {
  const auto one = multiplication_matrix(FourierMultiplier::constant(2, 1.0), 2, 3);
  const MatrixXcd& e = one.entries;
  REQUIRE(e.rows() == 49);
  for (int i = 0; i < 49; ++i)
    for (int k = 0; k < 49; ++k) {
      const auto& m = one.points[k];
      const double w = 1.0 / (1.0 + m[0] * m[0] + m[1] * m[1]);
      CHECK(e(i, k) == (i == k ? cd(w, 0.0) : cd(0.0, 0.0)));
    }

  FourierMultiplier f;
  f.dimension = 1;
  f.coefficients[{0}] = 2.0;
  f.coefficients[{1}] = 0.5;
  f.coefficients[{-1}] = 0.5;
  f.real_flag = true;
  const auto op = multiplication_matrix(f, 1, 10);
  REQUIRE(op.entries.rows() == 21);
  for (int i = 0; i < 21; ++i) {
    const int m = op.points[i][0];
    CHECK(m == i - 10);
    for (int k = 0; k < 21; ++k) {
      const int mk = op.points[k][0];
      const double w = 1.0 / std::sqrt(1.0 + double(mk) * mk);
      const double expected = m == mk ? 2.0 * w : (std::abs(m - mk) == 1 ? 0.5 * w : 0.0);
      CHECK(op.entries(i, k).real() == doctest::Approx(expected).epsilon(1e-15));
      CHECK(op.entries(i, k).imag() == 0.0);
    }
  }

  // Random trig polynomial on Z^2, spot checks against the defining formula.
  std::mt19937_64 gen(41);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  FourierMultiplier g;
  g.dimension = 2;
  for (int a = -2; a <= 2; ++a)
    for (int b = -2; b <= 2; ++b) g.coefficients[{a, b}] = cd(u(gen), u(gen));
  const auto gop = multiplication_matrix(g, 2, 6, 0.75);
  std::uniform_int_distribution<int> idx(0, int(gop.points.size()) - 1);
  for (int trial = 0; trial < 100; ++trial) {
    const int i = idx(gen), k = idx(gen);
    const auto& mi = gop.points[i];
    const auto& mk = gop.points[k];
    const cd expected = g.coefficient({mi[0] - mk[0], mi[1] - mk[1]}) *
                        std::pow(1.0 + mk[0] * mk[0] + mk[1] * mk[1], -0.75);
    CHECK(std::abs(gop.entries(i, k) - expected) <= 1e-15 * std::abs(expected));
  }

  CHECK_THROWS_AS(multiplication_matrix(g, 2, 500, 0.0, 16), Error);

  FourierMultiplier wide;
  wide.dimension = 1;
  wide.coefficients[{9}] = 1.0;
  CHECK_FALSE(multiplication_matrix(wide, 1, 2).warnings.empty());
}

TEST_CASE("FourierMultiplier validation") {
  FourierMultiplier f;
  f.dimension = 1;
  f.coefficients[{1}] = cd(0.5, 0.1);
  f.coefficients[{-1}] = cd(0.5, 0.1);
  f.real_flag = true;
  CHECK_THROWS_AS(f.validate(), Error);
  f.coefficients[{-1}] = cd(0.5, -0.1);
  CHECK_NOTHROW(f.validate());
  f.coefficients[{1, 2}] = 1.0;
  CHECK_THROWS_AS(f.validate(), Error);
}

TEST_CASE("singular_values") {
  Eigen::VectorXcd d(4);
  d << cd(-3, 0), cd(0, 1), cd(2, 0), cd(0, 0);
  const auto s = singular_values(d.asDiagonal().toDenseMatrix());
  CHECK(s[1] == doctest::Approx(3.0));
  CHECK(s[2] == doctest::Approx(2.0));
  CHECK(s[3] == doctest::Approx(1.0));
  CHECK(s[4] == doctest::Approx(0.0));

  std::mt19937_64 gen(51);
  const Eigen::VectorXcd u = random_matrix(gen, 6).col(0);
  const auto r1 = singular_values(u * u.adjoint());
  CHECK(r1[1] == doctest::Approx(u.squaredNorm()).epsilon(1e-12));
  for (int i = 2; i <= 6; ++i) CHECK(r1[i] <= 1e-7 * r1[1]);

  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXcd a = random_matrix(gen, 16);
    const MatrixXcd U = random_unitary(gen, 16);
    double residual = 0.0;
    const auto sa = singular_values(a, &residual);
    const auto sb = singular_values(U.adjoint() * a * U);
    CHECK(residual <= 1e-8 * sa[1] * sa[1]);
    for (int i = 1; i <= 16; ++i) CHECK(std::abs(sa[i] - sb[i]) <= 1e-8 * sa[1]);
  }
}

TEST_CASE("matrix and lattice spectra agree for f = 1") {
  for (const int n : {1, 2}) {
    const int M = n == 1 ? 40 : 6;
    const auto op = multiplication_matrix(FourierMultiplier::constant(n, 1.0), n, M);
    const auto s = singular_values(op.entries);
    std::vector<double> oracle;
    for (const auto& m : op.points) {
      double r2 = 0.0;
      for (const int c : m) r2 += double(c) * c;
      oracle.push_back(std::pow(1.0 + r2, -0.5 * n));
    }
    std::sort(oracle.begin(), oracle.end(), std::greater<>());
    REQUIRE(s.length() == oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      CHECK(s[i + 1] == doctest::Approx(oracle[i]).epsilon(1e-10));
    }
  }
}

TEST_CASE("hermitian_decompose") {
  std::mt19937_64 gen(61);
  const MatrixXcd b = random_matrix(gen, 5);
  const MatrixXcd pos = b * b.adjoint();
  const auto p = hermitian_decompose(pos);
  CHECK((p.t1 - pos).norm() <= 1e-12 * pos.norm());
  CHECK(p.t2.norm() <= 1e-12 * pos.norm());
  CHECK(p.t3.norm() <= 1e-12 * pos.norm());
  CHECK(p.t4.norm() <= 1e-12 * pos.norm());

  MatrixXcd d = MatrixXcd::Zero(2, 2);
  d(0, 0) = 3.0;
  d(1, 1) = -2.0;
  const auto h = hermitian_decompose(d);
  CHECK(std::abs(h.t1(0, 0) - 3.0) < 1e-14);
  CHECK(std::abs(h.t1(1, 1)) < 1e-14);
  CHECK(std::abs(h.t2(1, 1) - 2.0) < 1e-14);
  CHECK(std::abs(h.t2(0, 0)) < 1e-14);

  const cd i(0.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const MatrixXcd t = random_matrix(gen, 8);
    const auto q = hermitian_decompose(t);
    const MatrixXcd back = q.t1 - q.t2 + i * q.t3 - i * q.t4;
    const double scale = t.norm();
    CHECK((back - t).norm() <= 1e-10 * scale);
    CHECK((q.t1 * q.t2).norm() <= 1e-8 * scale * scale);
    CHECK((q.t3 * q.t4).norm() <= 1e-8 * scale * scale);
    for (const MatrixXcd* part : {&q.t1, &q.t2, &q.t3, &q.t4}) {
      Eigen::SelfAdjointEigenSolver<MatrixXcd> es(*part);
      CHECK(es.eigenvalues().minCoeff() >= -1e-10 * scale);
    }
  }
}

TEST_CASE("tilde_mu of a decomposed 3x3 matrix") {
  // T = [[2, 1+i, 0], [1-i, -1, i], [0, -i, 1]] is Hermitian, so T3 = T4 = 0
  // and ~mu = mu(T_+) - mu(T_-), built here from an independent eigensolve.
  MatrixXcd t(3, 3);
  const cd i(0.0, 1.0);
  t << 2.0, 1.0 + i, 0.0, 1.0 - i, -1.0, i, 0.0, -i, 1.0;
  Eigen::SelfAdjointEigenSolver<MatrixXcd> es(t);
  std::vector<double> pos, neg;
  for (int k = 0; k < 3; ++k) {
    const double ev = es.eigenvalues()(k);
    pos.push_back(std::max(ev, 0.0));
    neg.push_back(std::max(-ev, 0.0));
  }
  std::sort(pos.begin(), pos.end(), std::greater<>());
  std::sort(neg.begin(), neg.end(), std::greater<>());

  const auto parts = hermitian_decompose(t);
  const auto tm = tilde_mu(singular_values(parts.t1), singular_values(parts.t2),
                           singular_values(parts.t3), singular_values(parts.t4));
  REQUIRE(tm.size() == 3);
  // Singular values come from T* T, so zero ones carry sqrt(eps) |T| noise.
  for (int k = 0; k < 3; ++k) {
    CHECK(std::abs(tm[k].real() - (pos[k] - neg[k])) < 1e-7);
    CHECK(std::abs(tm[k].imag()) < 1e-7);
  }

  // Positive operator: ~mu is its own mu sequence.
  const MatrixXcd p = t * t;
  const auto pp = hermitian_decompose(p);
  const auto sp = singular_values(p);
  const auto tp = tilde_mu(singular_values(pp.t1), singular_values(pp.t2),
                           singular_values(pp.t3), singular_values(pp.t4));
  for (int k = 0; k < 3; ++k) CHECK(std::abs(tp[k] - sp[k + 1]) < 1e-7);
}

TEST_CASE("ordered_basis and cantor_index") {
  const auto basis = ordered_basis(2, 3.0);
  CHECK(basis.front() == LatticePoint{0, 0});
  for (std::size_t i = 1; i < basis.size(); ++i) {
    const auto r = [](const LatticePoint& m) { return m[0] * m[0] + m[1] * m[1]; };
    CHECK(r(basis[i - 1]) <= r(basis[i]));
    if (r(basis[i - 1]) == r(basis[i])) CHECK(cantor_index(basis[i - 1]) < cantor_index(basis[i]));
  }
  std::map<std::uint64_t, int> seen;
  for (int a = -20; a <= 20; ++a)
    for (int b = -20; b <= 20; ++b) ++seen[cantor_index({a, b})];
  CHECK(seen.size() == 41u * 41u);
  CHECK(cantor_index({0}) == 0);
}

TEST_CASE("expectation sequences") {
  FourierMultiplier f;
  f.dimension = 2;
  f.coefficients[{0, 0}] = cd(1.5, 0.25);
  f.coefficients[{1, -1}] = 0.3;
  f.coefficients[{-1, 1}] = 0.3;
  for (const auto& z : expectation_sequence(f, 2, 10.0)) CHECK(z == cd(1.5, 0.25));

  Eigen::VectorXcd d(4);
  d << 4.0, 3.0, 2.0, 1.0;
  const auto diag = expectation_sequence(MatrixXcd(d.asDiagonal()), MatrixXcd::Identity(4, 4));
  for (int k = 0; k < 4; ++k) CHECK(diag[k] == d(k));

  std::mt19937_64 gen(71);
  const MatrixXcd b = random_matrix(gen, 8);
  const MatrixXcd a = b + b.adjoint();
  const MatrixXcd basis = random_unitary(gen, 8);
  const auto e = expectation_sequence(a, basis);
  for (int k = 0; k < 8; ++k) {
    cd q = 0.0;
    for (int i = 0; i < 8; ++i)
      for (int j = 0; j < 8; ++j) q += std::conj(basis(i, k)) * a(i, j) * basis(j, k);
    CHECK(std::abs(e[k] - q) < 1e-12);
  }
}

TEST_CASE("connes_rhs") {
  CHECK(connes_rhs(FourierMultiplier::constant(2, 1.0), 2).real() == M_PI);
  CHECK(connes_rhs(FourierMultiplier::constant(1, 1.0), 1).real() == 2.0);
  CHECK(connes_rhs(FourierMultiplier::constant(3, 1.0), 3).real() ==
        doctest::Approx(4.0 * M_PI / 3.0));
  FourierMultiplier zero_mean;
  zero_mean.dimension = 1;
  zero_mean.coefficients[{1}] = 1.0;
  CHECK(connes_rhs(zero_mean, 1) == cd(0.0, 0.0));
  CHECK(sphere_area(1) == 2.0);
  CHECK(sphere_area(2) == 2.0 * M_PI);
  CHECK(sphere_area(3) == 4.0 * M_PI);
}

TEST_CASE("domination_check") {
  const std::vector<double> ones(64, 1.0);
  const std::vector<std::vector<double>> exps(10, ones);
  CHECK(domination_check(exps, ones));

  // Spikes of height m on support 1/m against a bounded h.
  std::vector<std::vector<double>> spikes;
  for (int m = 1; m <= 8; ++m) {
    std::vector<double> p(64, 0.0);
    for (int i = 0; i < 64 / m; ++i) p[i] = m;
    spikes.push_back(p);
  }
  const std::vector<double> h(64, 4.0);
  CHECK_FALSE(domination_check(spikes, h));

  const std::vector<double> prof{0.1, 0.5, 2.0};
  CHECK(domination_check({prof}, prof));
  CHECK_THROWS_AS(domination_check({prof}, ones), Error);
}
