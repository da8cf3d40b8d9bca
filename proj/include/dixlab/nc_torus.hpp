#pragma once

// Coefficient algebra of the noncommutative torus: finitely supported
// a = sum a_{r,s} u^r v^s with lambda = e^{2 pi i theta}. The product and
// involution follow
//   (ab)_{r,s} = sum_{m,n} a_{r-m,n} lambda^{mn} b_{m,s-n},
//   (a*)_{r,s} = lambda^{rs} conj(a_{-r,-s}),
// which gives u v = lambda^{-1} v u.

#include <complex>
#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "dixlab/seq_core.hpp"
#include "dixlab/spectral_models.hpp"

namespace dixlab {

class NCTorusElement {
 public:
  using Index = std::pair<int, int>;

  explicit NCTorusElement(double theta);

  static NCTorusElement identity(double theta);
  static NCTorusElement monomial(int m, int n, double theta);  // u^m v^n
  static NCTorusElement u(double theta) { return monomial(1, 0, theta); }
  static NCTorusElement v(double theta) { return monomial(0, 1, theta); }

  double theta() const { return theta_; }
  std::complex<double> lambda() const { return lambda_power(1); }
  /// lambda^k, reduced mod 1 in the exponent before taking the phase.
  std::complex<double> lambda_power(std::int64_t k) const;

  const std::map<Index, std::complex<double>>& coefficients() const { return coeffs_; }
  std::complex<double> coefficient(int r, int s) const;
  void set(int r, int s, std::complex<double> value);
  void add(int r, int s, std::complex<double> value);

 private:
  double theta_;
  std::map<Index, std::complex<double>> coeffs_;
};

NCTorusElement nc_product(const NCTorusElement& a, const NCTorusElement& b);
NCTorusElement nc_star(const NCTorusElement& a);
std::complex<double> nc_tau0(const NCTorusElement& a);

/// <u^m v^n, a u^m v^n> = tau0((u^m v^n)* a u^m v^n) along the Delta_theta
/// eigenbasis within the cutoff (same ordering as ordered_basis(2, cutoff)).
std::vector<std::complex<double>> nc_expectation_sequence(const NCTorusElement& a,
                                                          double cutoff);

/// Spectrum of (1 + Delta_theta)^{-power}; Delta_theta(u^m v^n) = (m^2+n^2) u^m v^n,
/// so this is independent of theta.
SingularSequence nc_torus_spectrum(double cutoff, double power = 0.0,
                                   std::size_t budget_mb = kDefaultBudgetMb);

/// (eigenvalue of Delta_theta, multiplicity) within the cutoff, ascending.
std::vector<std::pair<std::uint64_t, std::uint64_t>> nc_laplacian_multiplicities(double cutoff);

}  // namespace dixlab
