#include "dixlab/spectral_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace dixlab {

namespace {

void check_dimension(int n) {
  if (n < 1 || n > 3) throw Error("lattice dimension must be 1, 2 or 3, got " + std::to_string(n));
}

std::uint64_t floor_square(double cutoff) {
  if (!(cutoff >= 1.0) || !std::isfinite(cutoff)) {
    throw Error("cutoff radius must be >= 1, got " + format_g12(cutoff));
  }
  auto J = static_cast<std::uint64_t>(std::floor(cutoff * cutoff));
  // Guard against rounding of R^2 at exact integer radii.
  while (static_cast<double>(J + 1) <= cutoff * cutoff) ++J;
  while (J > 0 && static_cast<double>(J) > cutoff * cutoff) --J;
  return J;
}

void check_budget(double bytes, std::size_t budget_mb, const std::string& what) {
  const double budget = static_cast<double>(budget_mb) * 1024.0 * 1024.0;
  if (bytes > budget) {
    throw Error(what + " needs " + format_g12(std::ceil(bytes / (1024.0 * 1024.0))) +
                " MB, over the " + std::to_string(budget_mb) + " MB budget");
  }
}

double effective_power(int n, double power) { return power > 0.0 ? power : 0.5 * n; }

double ball_volume(int n) { return sphere_area(n) / n; }

}  // namespace

double sphere_area(int n) {
  switch (n) {
    case 1: return 2.0;
    case 2: return 2.0 * std::numbers::pi;
    case 3: return 4.0 * std::numbers::pi;
    default: check_dimension(n);
  }
  return 0.0;
}

std::uint64_t LatticeShells::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

double LatticeShells::tail_radius() const {
  if (dimension == 1) return std::floor(cutoff) + 0.5;
  return std::sqrt(static_cast<double>(max_shell()) + 0.5);
}

LatticeShells lattice_shells(int n, double cutoff, std::size_t budget_mb) {
  check_dimension(n);
  const std::uint64_t J = floor_square(cutoff);
  check_budget(static_cast<double>(J + 1) * sizeof(std::uint64_t), budget_mb, "lattice shells");
  LatticeShells shells;
  shells.dimension = n;
  shells.cutoff = cutoff;
  shells.counts.assign(J + 1, 0);
  const auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(J)) + 1.0);
  const auto j = static_cast<std::int64_t>(J);
  auto& c = shells.counts;
  if (n == 1) {
    for (std::int64_t x = -r; x <= r; ++x) {
      if (x * x <= j) ++c[x * x];
    }
  } else if (n == 2) {
    for (std::int64_t x = -r; x <= r; ++x) {
      const std::int64_t rest = j - x * x;
      if (rest < 0) continue;
      for (std::int64_t y = -r; y <= r; ++y) {
        if (y * y <= rest) ++c[x * x + y * y];
      }
    }
  } else {
    for (std::int64_t x = -r; x <= r; ++x) {
      for (std::int64_t y = -r; y <= r; ++y) {
        const std::int64_t rest = j - x * x - y * y;
        if (rest < 0) continue;
        for (std::int64_t z = -r; z <= r; ++z) {
          if (z * z <= rest) ++c[x * x + y * y + z * z];
        }
      }
    }
  }
  return shells;
}

SingularSequence torus_spectrum(const LatticeShells& shells, double power) {
  const int n = shells.dimension;
  const double p = effective_power(n, power);
  std::vector<double> values;
  values.reserve(shells.total());
  for (std::uint64_t j = 0; j < shells.counts.size(); ++j) {
    if (shells.counts[j] == 0) continue;
    const double v = std::pow(1.0 + static_cast<double>(j), -p);
    values.insert(values.end(), shells.counts[j], v);
  }
  const double a = 2.0 * p / n;
  const PowerLogTail tail{std::pow(ball_volume(n), a), a, 0.0};
  return SingularSequence::from_sorted(std::move(values), tail);
}

SingularSequence torus_spectrum(int n, double cutoff, double power, std::size_t budget_mb) {
  check_dimension(n);
  const double J = static_cast<double>(floor_square(cutoff));
  const double estimated_points = ball_volume(n) * std::pow(J + 1.0, 0.5 * n) + 8.0;
  check_budget(estimated_points * sizeof(double), budget_mb, "torus spectrum");
  return torus_spectrum(lattice_shells(n, cutoff, budget_mb), power);
}

TailCorrectedValue lattice_zeta(const LatticeShells& shells, double s, double power,
                                int stride) {
  if (stride < 1) throw Error("lattice_zeta: stride must be >= 1");
  const int n = shells.dimension;
  const double e = effective_power(n, power) * s;
  if (!(2.0 * e > n)) {
    throw Error("lattice_zeta: divergent at s=" + format_g12(s) + " (need power*s > n/2)");
  }
  const auto q = static_cast<double>(stride);
  const double q2 = q * q;
  CompensatedSum sum;
  for (std::uint64_t j = shells.counts.size(); j-- > 0;) {
    if (shells.counts[j] == 0) continue;
    sum.add(static_cast<double>(shells.counts[j]) *
            std::pow(1.0 + q2 * static_cast<double>(j), -e));
  }
  // int_{|x| > rho} (1+|x|^2)^{-e} dx = (area/2) B(1/(1+rho^2); e - n/2, n/2),
  // taken at the scaled radius q rho and divided by the cell volume q^n.
  const double rho = q * shells.tail_radius();
  const double x0 = 1.0 / (1.0 + rho * rho);
  double tail = 0.0;
  if (n == 2) {
    tail = std::numbers::pi * std::pow(1.0 + rho * rho, 1.0 - e) / (e - 1.0);
  } else {
    tail = 0.5 * sphere_area(n) * boost::math::beta(e - 0.5 * n, 0.5 * n, x0);
  }
  tail /= std::pow(q, n);
  sum.add(tail);
  return {sum.value(), tail};
}

TailCorrectedValue lattice_zeta(int n, double s, double cutoff, double power) {
  return lattice_zeta(lattice_shells(n, cutoff), s, power);
}

TailCorrectedValue lattice_heat(const LatticeShells& shells, double t, double alpha_exp,
                                double power) {
  if (!(t > 0.0) || !(alpha_exp > 0.0)) throw Error("lattice_heat: need t > 0 and alpha > 0");
  const int n = shells.dimension;
  const double q = effective_power(n, power) * alpha_exp;  // exponent of (1 + r^2)
  const double T = std::pow(t, alpha_exp);
  CompensatedSum sum;
  bool truncated = false;
  for (std::uint64_t j = 0; j < shells.counts.size(); ++j) {
    if (shells.counts[j] == 0) continue;
    const double term = static_cast<double>(shells.counts[j]) *
                        std::exp(-std::pow(1.0 + static_cast<double>(j), q) / T);
    sum.add(term);
    if (term < 1e-18 * sum.value()) {
      truncated = true;
      break;
    }
  }
  double tail = 0.0;
  if (!truncated) {
    const double rho = shells.tail_radius();
    const double u0 = 1.0 + rho * rho;
    if (n == 2) {
      // pi int_{u0}^inf exp(-u^q / T) du = (pi T^{1/q} / q) Gamma(1/q, u0^q / T)
      tail = std::numbers::pi * std::pow(T, 1.0 / q) / q *
             boost::math::tgamma(1.0 / q, std::pow(u0, q) / T);
    } else {
      const double area = sphere_area(n);
      boost::math::quadrature::exp_sinh<double> integrator;
      auto f = [&](double x) {
        const double r = rho + x;
        return area * std::pow(r, n - 1) * std::exp(-std::pow(1.0 + r * r, q) / T);
      };
      tail = integrator.integrate(f, 0.0, std::numeric_limits<double>::infinity());
    }
  }
  sum.add(tail);
  return {sum.value() / t, tail / t};
}

FourierMultiplier FourierMultiplier::constant(int n, std::complex<double> c) {
  FourierMultiplier f;
  f.dimension = n;
  f.coefficients[LatticePoint(static_cast<std::size_t>(n), 0)] = c;
  f.real_flag = c.imag() == 0.0;
  return f;
}

std::complex<double> FourierMultiplier::coefficient(const LatticePoint& m) const {
  const auto it = coefficients.find(m);
  return it == coefficients.end() ? std::complex<double>{} : it->second;
}

std::complex<double> FourierMultiplier::mean() const {
  return coefficient(LatticePoint(static_cast<std::size_t>(dimension), 0));
}

void FourierMultiplier::validate() const {
  check_dimension(dimension);
  for (const auto& [m, c] : coefficients) {
    if (m.size() != static_cast<std::size_t>(dimension)) {
      throw Error("FourierMultiplier: coefficient index of wrong dimension");
    }
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) {
      throw Error("FourierMultiplier: non-finite coefficient");
    }
    if (real_flag) {
      LatticePoint neg(m.size());
      for (std::size_t i = 0; i < m.size(); ++i) neg[i] = -m[i];
      if (coefficient(neg) != std::conj(c)) {
        throw Error("FourierMultiplier: real_flag set but coefficients are not Hermitian");
      }
    }
  }
}

namespace {

std::vector<LatticePoint> cube_points(int n, int M) {
  std::vector<LatticePoint> pts;
  LatticePoint m(static_cast<std::size_t>(n), -M);
  while (true) {
    pts.push_back(m);
    int i = n - 1;
    while (i >= 0 && m[i] == M) m[i--] = -M;
    if (i < 0) break;
    ++m[i];
  }
  return pts;
}

std::int64_t norm2(const LatticePoint& m) {
  std::int64_t s = 0;
  for (const int v : m) s += static_cast<std::int64_t>(v) * v;
  return s;
}

}  // namespace

TruncatedOperator multiplication_matrix(const FourierMultiplier& f, int n, int M, double power,
                                        std::size_t budget_mb) {
  check_dimension(n);
  if (f.dimension != n) throw Error("multiplication_matrix: multiplier dimension mismatch");
  f.validate();
  if (M < 0) throw Error("multiplication_matrix: halfwidth must be nonnegative");
  const double dim = std::pow(2.0 * M + 1.0, n);
  check_budget(dim * dim * sizeof(std::complex<double>), budget_mb, "multiplication matrix");
  TruncatedOperator op;
  op.dimension = n;
  op.halfwidth = M;
  op.power = effective_power(n, power);
  op.points = cube_points(n, M);
  const auto N = static_cast<Eigen::Index>(op.points.size());
  op.entries = Eigen::MatrixXcd::Zero(N, N);
  for (const auto& [k, c] : f.coefficients) {
    for (const int v : k) {
      if (std::abs(v) > 2 * M) {
        op.warnings.push_back("coefficient support exceeds the 2M cube; truncated");
        break;
      }
    }
  }
  std::vector<double> weight(op.points.size());
  for (std::size_t i = 0; i < op.points.size(); ++i) {
    weight[i] = std::pow(1.0 + static_cast<double>(norm2(op.points[i])), -op.power);
  }
  // Only coefficients in the support contribute: walk the support per column.
  std::vector<std::int64_t> stride(static_cast<std::size_t>(n));
  std::int64_t s = 1;
  for (int i = n - 1; i >= 0; --i) {
    stride[i] = s;
    s *= 2 * M + 1;
  }
  for (Eigen::Index col = 0; col < N; ++col) {
    const auto& mk = op.points[static_cast<std::size_t>(col)];
    for (const auto& [k, c] : f.coefficients) {
      std::int64_t row = 0;
      bool inside = true;
      for (int i = 0; i < n; ++i) {
        const int mi = mk[i] + k[i];
        if (mi < -M || mi > M) {
          inside = false;
          break;
        }
        row += (mi + M) * stride[i];
      }
      if (inside) op.entries(row, col) = c * weight[static_cast<std::size_t>(col)];
    }
  }
  op.provenance = "multiplier with " + std::to_string(f.coefficients.size()) +
                  " coefficients times (1+|m|^2)^-" + format_g12(op.power) + ", n=" +
                  std::to_string(n) + ", M=" + std::to_string(M);
  return op;
}

namespace {

template <class Matrix>
SingularSequence singular_values_impl(const Matrix& A, double* max_residual) {
  using Solver = Eigen::SelfAdjointEigenSolver<Matrix>;
  const Matrix G = A.adjoint() * A;
  Solver es(G);
  if (es.info() != Eigen::Success) throw Error("singular_values: eigensolver did not converge");
  const auto& lambda = es.eigenvalues();
  const auto& V = es.eigenvectors();
  const double norm2 = lambda.size() > 0 ? std::max(lambda.maxCoeff(), 0.0) : 0.0;
  const Matrix R = G * V - V * lambda.asDiagonal();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < R.cols(); ++i) worst = std::max(worst, R.col(i).norm());
  if (max_residual) *max_residual = worst;
  if (worst > 1e-8 * norm2 && worst > 0.0) {
    throw Error("singular_values: residual " + format_g12(worst) + " exceeds 1e-8 |T|^2 = " +
                format_g12(1e-8 * norm2));
  }
  std::vector<double> s(static_cast<std::size_t>(lambda.size()));
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    s[static_cast<std::size_t>(i)] = std::sqrt(std::max(lambda(i), 0.0));
  }
  std::sort(s.begin(), s.end(), std::greater<>());
  return SingularSequence::from_sorted(std::move(s));
}

}  // namespace

SingularSequence singular_values(const Eigen::MatrixXcd& T, double* max_residual) {
  if (T.rows() != T.cols()) throw Error("singular_values: matrix must be square");
  if (T.size() == 0) return {};
  if (T.imag().cwiseAbs().maxCoeff() == 0.0) {
    const Eigen::MatrixXd A = T.real();
    return singular_values_impl(A, max_residual);
  }
  return singular_values_impl(T, max_residual);
}

HermitianParts hermitian_decompose(const Eigen::MatrixXcd& T) {
  if (T.rows() != T.cols()) throw Error("hermitian_decompose: matrix must be square");
  const std::complex<double> i{0.0, 1.0};
  const Eigen::MatrixXcd re = 0.5 * (T + T.adjoint());
  const Eigen::MatrixXcd im = (T - T.adjoint()) / (2.0 * i);
  auto split = [](const Eigen::MatrixXcd& H, Eigen::MatrixXcd& pos, Eigen::MatrixXcd& neg) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
    if (es.info() != Eigen::Success) throw Error("hermitian_decompose: eigensolver failed");
    const Eigen::VectorXd lp = es.eigenvalues().cwiseMax(0.0);
    const Eigen::VectorXd ln = (-es.eigenvalues()).cwiseMax(0.0);
    const auto& V = es.eigenvectors();
    pos = V * lp.asDiagonal() * V.adjoint();
    neg = V * ln.asDiagonal() * V.adjoint();
  };
  HermitianParts parts;
  split(re, parts.t1, parts.t2);
  split(im, parts.t3, parts.t4);
  return parts;
}

std::uint64_t cantor_index(const LatticePoint& m) {
  if (m.empty()) return 0;
  auto zig = [](int v) -> std::uint64_t {
    return v >= 0 ? 2 * static_cast<std::uint64_t>(v) : 2 * static_cast<std::uint64_t>(-(std::int64_t)v) - 1;
  };
  std::uint64_t c = zig(m[0]);
  for (std::size_t i = 1; i < m.size(); ++i) {
    const std::uint64_t z = zig(m[i]);
    c = (c + z) * (c + z + 1) / 2 + z;
  }
  return c;
}

std::vector<LatticePoint> ordered_basis(int n, double cutoff) {
  check_dimension(n);
  const auto J = static_cast<std::int64_t>(floor_square(cutoff));
  const int M = static_cast<int>(std::sqrt(static_cast<double>(J)) + 1.0);
  std::vector<std::pair<std::pair<std::int64_t, std::uint64_t>, LatticePoint>> keyed;
  for (auto& m : cube_points(n, M)) {
    const std::int64_t r2 = norm2(m);
    if (r2 > J) continue;
    keyed.push_back({{r2, cantor_index(m)}, std::move(m)});
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<LatticePoint> out;
  out.reserve(keyed.size());
  for (auto& k : keyed) out.push_back(std::move(k.second));
  return out;
}

std::vector<std::complex<double>> expectation_sequence(const FourierMultiplier& f, int n,
                                                       double cutoff) {
  if (f.dimension != n) throw Error("expectation_sequence: multiplier dimension mismatch");
  std::vector<std::complex<double>> out;
  for (const auto& m : ordered_basis(n, cutoff)) {
    // <e_m, f e_m> = sum_k f^(k) <e_m, e_{m+k}>; only k = m - m survives.
    LatticePoint diff(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) diff[i] = m[i] - m[i];
    out.push_back(f.coefficient(diff));
  }
  return out;
}

std::vector<std::complex<double>> expectation_sequence(const Eigen::MatrixXcd& a,
                                                       const Eigen::MatrixXcd& basis) {
  if (a.rows() != a.cols() || basis.rows() != a.rows()) {
    throw Error("expectation_sequence: operator and basis dimensions differ");
  }
  std::vector<std::complex<double>> out;
  for (Eigen::Index j = 0; j < basis.cols(); ++j) {
    out.push_back(basis.col(j).dot(a * basis.col(j)));
  }
  return out;
}

std::complex<double> connes_rhs(const FourierMultiplier& f, int n) {
  return sphere_area(n) * f.mean() / static_cast<double>(n);
}

bool domination_check(const std::vector<std::vector<double>>& basis_profiles,
                      const std::vector<double>& candidate) {
  for (const double c : candidate) {
    if (c < 0.0) throw Error("domination_check: candidate profile must be nonnegative");
  }
  bool dominated = true;
  for (const auto& profile : basis_profiles) {
    if (profile.size() != candidate.size()) throw Error("domination_check: grid mismatch");
    for (std::size_t i = 0; i < profile.size(); ++i) {
      if (profile[i] < 0.0) throw Error("domination_check: profiles must be nonnegative");
      if (profile[i] > candidate[i]) dominated = false;
    }
  }
  return dominated;
}

}  // namespace dixlab
