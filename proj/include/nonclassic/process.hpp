#pragma once

// Two-mode m:n exchange Hamiltonian
//   H = w1 a^+a + w2 b^+b + g (a^+m b^n + a^m b^+n)
// on a truncated basis, with five-wave mixing (3:2) and third-harmonic
// generation (3:1) presets. Elements that would leave the basis are dropped.

#include <algorithm>
#include <cmath>
#include <complex>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "nonclassic/error.hpp"
#include "nonclassic/fock.hpp"
#include "nonclassic/numeric.hpp"

namespace nonclassic {

inline constexpr int kMaxExchangeOrder = 6;

struct ProcessSpec {
  double omega1 = 1.0;
  double omega2 = 1.0;
  double g = 0.0;
  int m = 1;  // pump quanta exchanged
  int n = 1;  // signal quanta exchanged
  std::string name;

  /// Three pump photons absorbed, two signal photons emitted; w2 = 3 w1 / 2.
  static ProcessSpec five_wave_mixing(double g, double omega1 = 1.0) {
    return {omega1, 1.5 * omega1, g, 3, 2, "five_wave_mixing"};
  }

  /// Three pump photons converted into one signal photon; w2 = 3 w1.
  static ProcessSpec third_harmonic(double g, double omega1 = 1.0) {
    return {omega1, 3.0 * omega1, g, 3, 1, "third_harmonic"};
  }

  [[nodiscard]] double resonance_mismatch() const { return m * omega1 - n * omega2; }

  [[nodiscard]] bool is_resonant(double tol = 1e-12) const {
    return std::abs(resonance_mismatch()) <= tol * std::max({1.0, std::abs(m * omega1), std::abs(n * omega2)});
  }

  /// Q = n N_A + m N_B for one basis state.
  [[nodiscard]] long charge(int n_a, int n_b) const {
    return static_cast<long>(n) * n_a + static_cast<long>(m) * n_b;
  }

  void validate() const {
    if (!std::isfinite(omega1) || !std::isfinite(omega2) || !std::isfinite(g))
      throw InvalidArgument("ProcessSpec: nonfinite parameter");
    if (g < 0) throw InvalidArgument("ProcessSpec: coupling g must be >= 0");
    if (m < 1 || n < 1 || m > kMaxExchangeOrder || n > kMaxExchangeOrder)
      throw InvalidArgument("ProcessSpec: m and n must lie in [1, " + std::to_string(kMaxExchangeOrder) + "]");
  }
};

/// |<n_a - m, n_b + n| a^m b^+n |n_a, n_b>|^2 as an exact integer.
inline uint128 interaction_weight(int n_a, int n_b, int m, int n) {
  const uint128 pump = falling_factorial(static_cast<std::uint64_t>(n_a), m);
  const uint128 signal = rising_factorial_from(static_cast<std::uint64_t>(n_b), n);
  uint128 product = 0;
  if (__builtin_mul_overflow(pump, signal, &product))
    throw InvalidArgument("interaction_weight: 128-bit overflow");
  return product;
}

class HamiltonianMatrix {
public:
  using Sparse = Eigen::SparseMatrix<std::complex<double>, Eigen::ColMajor>;

  HamiltonianMatrix(ProcessSpec spec, FockCutoffs cutoffs, Sparse matrix, std::vector<std::string> warnings)
      : spec_(std::move(spec)), cutoffs_(cutoffs), matrix_(std::move(matrix)), warnings_(std::move(warnings)) {}

  [[nodiscard]] const ProcessSpec& spec() const { return spec_; }
  [[nodiscard]] const FockCutoffs& cutoffs() const { return cutoffs_; }
  [[nodiscard]] const Sparse& sparse() const { return matrix_; }
  [[nodiscard]] Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(matrix_); }
  [[nodiscard]] Eigen::Index dimension() const { return matrix_.rows(); }
  [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }

  [[nodiscard]] std::complex<double> element(Eigen::Index row, Eigen::Index col) const {
    return matrix_.coeff(row, col);
  }

  [[nodiscard]] bool is_hermitian() const {
    for (Eigen::Index col = 0; col < matrix_.outerSize(); ++col)
      for (Sparse::InnerIterator it(matrix_, col); it; ++it)
        if (it.value() != std::conj(matrix_.coeff(it.col(), it.row()))) return false;
    return true;
  }

  [[nodiscard]] Eigen::VectorXcd apply(const Eigen::VectorXcd& psi) const { return matrix_ * psi; }

  [[nodiscard]] double expectation(const TwoModeState& state) const {
    if (!(state.cutoffs() == cutoffs_)) throw InvalidArgument("expectation: cutoff mismatch");
    return state.amplitudes().dot(matrix_ * state.amplitudes()).real();
  }

  /// Coordinate-format dump: `row col re im` per stored nonzero, column-major order.
  void write_coordinate(std::ostream& out) const {
    const auto precision = out.precision(17);
    out << "# dimension " << dimension() << " nonzeros " << matrix_.nonZeros() << '\n';
    for (Eigen::Index col = 0; col < matrix_.outerSize(); ++col)
      for (Sparse::InnerIterator it(matrix_, col); it; ++it)
        out << it.row() << ' ' << it.col() << ' ' << it.value().real() << ' ' << it.value().imag() << '\n';
    out.precision(precision);
  }

private:
  ProcessSpec spec_;
  FockCutoffs cutoffs_;
  Sparse matrix_;
  std::vector<std::string> warnings_;
};

inline HamiltonianMatrix build_hamiltonian(const ProcessSpec& spec, const FockCutoffs& cutoffs) {
  spec.validate();
  std::vector<std::string> warnings;
  if (!spec.is_resonant())
    warnings.push_back("resonance m*omega1 = n*omega2 violated (mismatch " +
                       std::to_string(spec.resonance_mismatch()) + ")");
  if (spec.m >= cutoffs.max_a() || spec.n >= cutoffs.max_b())
    warnings.push_back("cutoffs too small for the exchange orders: interaction vanishes identically");

  using Triplet = Eigen::Triplet<std::complex<double>>;
  std::vector<Triplet> entries;
  entries.reserve(static_cast<std::size_t>(cutoffs.dimension()) * 3);
  for (int n_a = 0; n_a < cutoffs.max_a(); ++n_a) {
    for (int n_b = 0; n_b < cutoffs.max_b(); ++n_b) {
      const auto i = cutoffs.index(n_a, n_b);
      entries.emplace_back(i, i, spec.omega1 * n_a + spec.omega2 * n_b);
      if (spec.g == 0 || !cutoffs.contains(n_a - spec.m, n_b + spec.n)) continue;
      const auto j = cutoffs.index(n_a - spec.m, n_b + spec.n);
      const double amplitude =
          spec.g * static_cast<double>(std::sqrt(to_long_double(interaction_weight(n_a, n_b, spec.m, spec.n))));
      entries.emplace_back(j, i, amplitude);
      entries.emplace_back(i, j, amplitude);
    }
  }
  HamiltonianMatrix::Sparse matrix(cutoffs.dimension(), cutoffs.dimension());
  matrix.setFromTriplets(entries.begin(), entries.end());
  matrix.makeCompressed();
  return {spec, cutoffs, std::move(matrix), std::move(warnings)};
}

/// Diagonal of Q = n N_A + m N_B over the basis.
inline Eigen::VectorXd conserved_charge(const ProcessSpec& spec, const FockCutoffs& cutoffs) {
  Eigen::VectorXd q(cutoffs.dimension());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const auto [n_a, n_b] = cutoffs.occupation(i);
    q[i] = static_cast<double>(spec.charge(n_a, n_b));
  }
  return q;
}

/// Frobenius norm of [H, Q]. Zero whenever every stored element connects equal-charge states.
inline double charge_commutator_norm(const HamiltonianMatrix& hamiltonian) {
  const Eigen::VectorXd q = conserved_charge(hamiltonian.spec(), hamiltonian.cutoffs());
  long double sum = 0;
  const auto& h = hamiltonian.sparse();
  for (Eigen::Index col = 0; col < h.outerSize(); ++col)
    for (HamiltonianMatrix::Sparse::InnerIterator it(h, col); it; ++it)
      sum += std::norm(it.value() * (q[it.col()] - q[it.row()]));
  return static_cast<double>(std::sqrt(sum));
}

} // namespace nonclassic
