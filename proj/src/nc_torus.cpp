#include "dixlab/nc_torus.hpp"

#include <cmath>
#include <numbers>

namespace dixlab {

NCTorusElement::NCTorusElement(double theta) : theta_(theta) {
  if (!(theta >= 0.0 && theta < 1.0)) {
    throw Error("NCTorusElement: theta must lie in [0, 1), got " + format_g12(theta));
  }
}

NCTorusElement NCTorusElement::identity(double theta) { return monomial(0, 0, theta); }

NCTorusElement NCTorusElement::monomial(int m, int n, double theta) {
  NCTorusElement e(theta);
  e.set(m, n, 1.0);
  return e;
}

std::complex<double> NCTorusElement::lambda_power(std::int64_t k) const {
  if (theta_ == 0.0 || k == 0) return 1.0;
  const double x = theta_ * static_cast<double>(k);
  const double frac = x - std::floor(x);
  return std::polar(1.0, 2.0 * std::numbers::pi * frac);
}

std::complex<double> NCTorusElement::coefficient(int r, int s) const {
  const auto it = coeffs_.find({r, s});
  return it == coeffs_.end() ? std::complex<double>{} : it->second;
}

void NCTorusElement::set(int r, int s, std::complex<double> value) { coeffs_[{r, s}] = value; }

void NCTorusElement::add(int r, int s, std::complex<double> value) { coeffs_[{r, s}] += value; }

namespace {
void require_same_theta(const NCTorusElement& a, const NCTorusElement& b) {
  if (a.theta() != b.theta()) {
    throw Error("nc_product: theta mismatch (" + format_g12(a.theta()) + " vs " +
                format_g12(b.theta()) + ")");
  }
}
}  // namespace

NCTorusElement nc_product(const NCTorusElement& a, const NCTorusElement& b) {
  require_same_theta(a, b);
  NCTorusElement out(a.theta());
  // a_{p,q} b_{p',q'} lands on (p+p', q+q') with phase lambda^{q p'}.
  for (const auto& [ia, ca] : a.coefficients()) {
    for (const auto& [ib, cb] : b.coefficients()) {
      const auto phase = a.lambda_power(static_cast<std::int64_t>(ia.second) * ib.first);
      out.add(ia.first + ib.first, ia.second + ib.second, ca * phase * cb);
    }
  }
  return out;
}

NCTorusElement nc_star(const NCTorusElement& a) {
  NCTorusElement out(a.theta());
  for (const auto& [i, c] : a.coefficients()) {
    // (a*)_{-p,-q} = lambda^{pq} conj(a_{p,q})
    out.set(-i.first, -i.second,
            a.lambda_power(static_cast<std::int64_t>(i.first) * i.second) * std::conj(c));
  }
  return out;
}

std::complex<double> nc_tau0(const NCTorusElement& a) { return a.coefficient(0, 0); }

std::vector<std::complex<double>> nc_expectation_sequence(const NCTorusElement& a,
                                                          double cutoff) {
  std::vector<std::complex<double>> out;
  for (const auto& m : ordered_basis(2, cutoff)) {
    const auto w = NCTorusElement::monomial(m[0], m[1], a.theta());
    out.push_back(nc_tau0(nc_product(nc_star(w), nc_product(a, w))));
  }
  return out;
}

SingularSequence nc_torus_spectrum(double cutoff, double power, std::size_t budget_mb) {
  return torus_spectrum(2, cutoff, power, budget_mb);
}

std::vector<std::pair<std::uint64_t, std::uint64_t>> nc_laplacian_multiplicities(double cutoff) {
  const auto shells = lattice_shells(2, cutoff);
  std::vector<std::pair<std::uint64_t, std::uint64_t>> out;
  for (std::uint64_t j = 0; j < shells.counts.size(); ++j) {
    if (shells.counts[j] > 0) out.emplace_back(j, shells.counts[j]);
  }
  return out;
}

}  // namespace dixlab
