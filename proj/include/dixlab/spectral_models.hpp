#pragma once

// Flat-torus lattice spectra with exact zeta/heat evaluators, Fourier
// multiplier truncations of f (1 + Delta)^{-power}, dense singular values,
// Hermitian decomposition, expectation sequences and domination checks.
//
// The torus is [0, 2pi)^n, so e^{i m.x} (m in Z^n) is an orthonormal
// eigenbasis of Delta with eigenvalue |m|^2.

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dixlab/seq_core.hpp"

namespace dixlab {

inline constexpr std::size_t kDefaultBudgetMb = 2048;

using LatticePoint = std::vector<int>;

struct LatticeModel {
  int dimension = 2;
  double operator_power = 0.0;  // 0 selects n/2
  double cutoff_radius = 1.0;

  double power() const { return operator_power > 0.0 ? operator_power : 0.5 * dimension; }
};

/// counts[j] = #{m in Z^n : |m|^2 = j} for j <= floor(cutoff^2).
struct LatticeShells {
  int dimension = 0;
  double cutoff = 0.0;
  std::vector<std::uint64_t> counts;

  std::uint64_t max_shell() const { return counts.empty() ? 0 : counts.size() - 1; }
  std::uint64_t total() const;
  /// Radius where the tail integral starts: sqrt(J + 1/2) for n >= 2 and
  /// floor(R) + 1/2 for n = 1.
  double tail_radius() const;
};

LatticeShells lattice_shells(int n, double cutoff, std::size_t budget_mb = kDefaultBudgetMb);

/// Vol(S^{n-1}) for n in {1, 2, 3}.
double sphere_area(int n);

/// Eigenvalues (1 + |m|^2)^{-power} for |m| <= cutoff, nonincreasing, with
/// the Weyl tail mu_k ~ (k / |B_n|)^{-2 power / n} attached.
SingularSequence torus_spectrum(int n, double cutoff, double power = 0.0,
                                std::size_t budget_mb = kDefaultBudgetMb);
SingularSequence torus_spectrum(const LatticeShells& shells, double power = 0.0);

struct TailCorrectedValue {
  double value = 0.0;  // explicit sum plus tail
  double tail = 0.0;   // tail contribution alone
};

/// sum_m (1 + q^2 |m|^2)^{-power s} over the shells plus the radial tail
/// integral; stride q > 1 restricts the torus sum to the sublattice (qZ)^n.
TailCorrectedValue lattice_zeta(const LatticeShells& shells, double s, double power = 0.0,
                                int stride = 1);
TailCorrectedValue lattice_zeta(int n, double s, double cutoff, double power = 0.0);

/// (1/t) sum_m exp(-(t (1+|m|^2)^{-power})^{-alpha}) over the shells plus the
/// radial tail integral.
TailCorrectedValue lattice_heat(const LatticeShells& shells, double t, double alpha_exp,
                                double power = 0.0);

/// Finitely supported Fourier coefficients on Z^n.
struct FourierMultiplier {
  int dimension = 1;
  std::map<LatticePoint, std::complex<double>> coefficients;
  bool real_flag = false;

  static FourierMultiplier constant(int n, std::complex<double> c);
  std::complex<double> coefficient(const LatticePoint& m) const;
  std::complex<double> mean() const;  // f^(0)
  /// Checks point dimensions and, when real_flag is set, exact Hermitian
  /// symmetry f^(-m) = conj f^(m).
  void validate() const;
};

struct TruncatedOperator {
  int dimension = 1;
  int halfwidth = 0;
  double power = 0.0;
  std::vector<LatticePoint> points;  // lexicographic order in the cube
  Eigen::MatrixXcd entries;
  std::string provenance;
  std::vector<std::string> warnings;
};

/// entry(m_i, m_k) = f^(m_i - m_k) (1 + |m_k|^2)^{-power} on the cube |m|_inf <= M.
TruncatedOperator multiplication_matrix(const FourierMultiplier& f, int n, int M,
                                        double power = 0.0,
                                        std::size_t budget_mb = kDefaultBudgetMb);

/// Square roots of the eigenvalues of T* T, nonincreasing. Every returned
/// pair satisfies |(T*T) v - s^2 v| <= 1e-8 |T|^2 or the call throws.
SingularSequence singular_values(const Eigen::MatrixXcd& T, double* max_residual = nullptr);

struct HermitianParts {
  Eigen::MatrixXcd t1, t2, t3, t4;  // T = t1 - t2 + i t3 - i t4, all >= 0
};

HermitianParts hermitian_decompose(const Eigen::MatrixXcd& T);

/// Bijection Z^n -> N: zigzag each coordinate, then nested Cantor pairing.
std::uint64_t cantor_index(const LatticePoint& m);

/// Lattice points with |m| <= cutoff ordered by nonincreasing eigenvalue
/// (increasing |m|^2), ties broken by cantor_index.
std::vector<LatticePoint> ordered_basis(int n, double cutoff);

/// <e_m, f e_m> along ordered_basis(n, cutoff).
std::vector<std::complex<double>> expectation_sequence(const FourierMultiplier& f, int n,
                                                       double cutoff);
/// <h_m, a h_m> for the orthonormal columns h_m of basis.
std::vector<std::complex<double>> expectation_sequence(const Eigen::MatrixXcd& a,
                                                       const Eigen::MatrixXcd& basis);

/// Vol(S^{n-1}) f^(0) / n.
std::complex<double> connes_rhs(const FourierMultiplier& f, int n);

/// True iff profile(x) <= candidate(x) at every grid point for every profile.
bool domination_check(const std::vector<std::vector<double>>& basis_profiles,
                      const std::vector<double>& candidate);

}  // namespace dixlab
