#pragma once

// Truncated two-mode Fock space: basis bookkeeping, state construction,
// marginal photon-number distributions and factorial moments.
//
// Basis layout is row-major over (n_a, n_b) with n_b fastest:
//   index(n_a, n_b) = n_a * max_b + n_b.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "nonclassic/error.hpp"
#include "nonclassic/numeric.hpp"

namespace nonclassic {

enum class Mode { A, B };

inline char mode_name(Mode mode) { return mode == Mode::A ? 'A' : 'B'; }

/// Largest factorial-moment order the library will compute.
inline constexpr int kMaxMomentOrder = 8;
/// Hard ceiling on truncation tail mass / boundary leakage.
inline constexpr double kLeakageCeiling = 1e-6;
/// Largest per-mode cutoff accepted.
inline constexpr int kMaxModeCutoff = 4096;

class FockCutoffs {
public:
  FockCutoffs(int max_a, int max_b) : max_a_(max_a), max_b_(max_b) {
    if (max_a < 1 || max_b < 1)
      throw InvalidArgument("FockCutoffs: cutoffs must be >= 1");
    if (max_a > kMaxModeCutoff || max_b > kMaxModeCutoff)
      throw InvalidArgument("FockCutoffs: cutoff exceeds " + std::to_string(kMaxModeCutoff));
  }

  [[nodiscard]] int max_a() const { return max_a_; }
  [[nodiscard]] int max_b() const { return max_b_; }
  [[nodiscard]] int max(Mode mode) const { return mode == Mode::A ? max_a_ : max_b_; }
  [[nodiscard]] Eigen::Index dimension() const {
    return static_cast<Eigen::Index>(max_a_) * max_b_;
  }

  [[nodiscard]] bool contains(int n_a, int n_b) const {
    return n_a >= 0 && n_b >= 0 && n_a < max_a_ && n_b < max_b_;
  }

  [[nodiscard]] Eigen::Index index(int n_a, int n_b) const {
    if (!contains(n_a, n_b)) throw InvalidArgument("FockCutoffs: occupation outside cutoffs");
    return static_cast<Eigen::Index>(n_a) * max_b_ + n_b;
  }

  [[nodiscard]] std::pair<int, int> occupation(Eigen::Index index) const {
    if (index < 0 || index >= dimension()) throw InvalidArgument("FockCutoffs: index out of range");
    return {static_cast<int>(index / max_b_), static_cast<int>(index % max_b_)};
  }

  friend bool operator==(const FockCutoffs&, const FockCutoffs&) = default;

private:
  int max_a_;
  int max_b_;
};

/// Suggested pump cutoff for a coherent input of mean photon number alpha_sq.
inline int suggest_max_a(double alpha_sq) {
  if (!std::isfinite(alpha_sq) || alpha_sq < 0) throw InvalidArgument("suggest_max_a: bad alpha_sq");
  return static_cast<int>(std::ceil(alpha_sq + 10.0 * std::sqrt(alpha_sq) + 15.0));
}

/// Pure two-mode state on a truncated basis.
class TwoModeState {
public:
  /// Takes the amplitudes as given; no renormalization.
  TwoModeState(FockCutoffs cutoffs, Eigen::VectorXcd amplitudes, double norm_deficit = 0.0)
      : cutoffs_(cutoffs), amplitudes_(std::move(amplitudes)), norm_deficit_(norm_deficit) {
    if (amplitudes_.size() != cutoffs_.dimension())
      throw InvalidArgument("TwoModeState: amplitude vector does not match cutoffs");
    if (!amplitudes_.allFinite()) throw InvalidArgument("TwoModeState: nonfinite amplitude");
  }

  /// Rescales to unit norm; the deficit 1 - |amps|^2 is kept as a diagnostic.
  static TwoModeState normalized(FockCutoffs cutoffs, Eigen::VectorXcd amplitudes) {
    const double norm_sq = amplitudes.squaredNorm();
    if (!(norm_sq > 0) || !std::isfinite(norm_sq))
      throw InvalidArgument("TwoModeState: cannot normalize a zero or nonfinite vector");
    amplitudes /= std::sqrt(norm_sq);
    return TwoModeState(cutoffs, std::move(amplitudes), 1.0 - norm_sq);
  }

  [[nodiscard]] const FockCutoffs& cutoffs() const { return cutoffs_; }
  [[nodiscard]] const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  [[nodiscard]] std::complex<double> amplitude(int n_a, int n_b) const {
    return amplitudes_[cutoffs_.index(n_a, n_b)];
  }
  [[nodiscard]] double norm() const { return amplitudes_.norm(); }
  /// Probability discarded by truncation before renormalization.
  [[nodiscard]] double norm_deficit() const { return norm_deficit_; }

  /// Probability on the outer boundary layers n_a = max_a-1 or n_b = max_b-1.
  [[nodiscard]] double leakage() const {
    const int top_a = cutoffs_.max_a() - 1;
    const int top_b = cutoffs_.max_b() - 1;
    CompensatedSum<long double> mass;
    for (int n_a = 0; n_a < cutoffs_.max_a(); ++n_a) {
      for (int n_b = 0; n_b < cutoffs_.max_b(); ++n_b) {
        if (n_a == top_a || n_b == top_b) mass += std::norm(amplitude(n_a, n_b));
      }
    }
    return static_cast<double>(mass.value());
  }

  /// Debug dump: one `n_a,n_b,re,im` line per basis state.
  void write_csv(std::ostream& out) const {
    const auto precision = out.precision(17);
    out << "n_a,n_b,re,im\n";
    for (Eigen::Index i = 0; i < amplitudes_.size(); ++i) {
      const auto [n_a, n_b] = cutoffs_.occupation(i);
      out << n_a << ',' << n_b << ',' << amplitudes_[i].real() << ',' << amplitudes_[i].imag() << '\n';
    }
    out.precision(precision);
  }

private:
  FockCutoffs cutoffs_;
  Eigen::VectorXcd amplitudes_;
  double norm_deficit_;
};

namespace detail {

inline double poisson_log_pmf(double mean, int n) {
  if (mean == 0) return n == 0 ? 0.0 : -std::numeric_limits<double>::infinity();
  return -mean + n * std::log(mean) - std::lgamma(n + 1.0);
}

// Sum of Poisson(mean) probabilities for n >= first, summed directly (no 1 - x cancellation).
inline double poisson_tail(double mean, int first) {
  if (mean == 0) return first <= 0 ? 1.0 : 0.0;
  CompensatedSum<long double> tail;
  for (int n = first;; ++n) {
    const long double term = std::exp(static_cast<long double>(poisson_log_pmf(mean, n)));
    tail += term;
    if (n > mean && term < 1e-40L * (tail.value() + 1e-300L)) break;
    if (n > first + 100000) break;
  }
  return static_cast<double>(tail.value());
}

} // namespace detail

/// |alpha> (x) |0>, truncated to `cutoffs` and renormalized.
/// The reported norm_deficit() is the Poisson tail mass beyond max_a.
inline TwoModeState make_coherent_vacuum(std::complex<double> alpha, const FockCutoffs& cutoffs) {
  if (!std::isfinite(alpha.real()) || !std::isfinite(alpha.imag()))
    throw InvalidArgument("make_coherent_vacuum: nonfinite alpha");
  const double mean = std::norm(alpha);
  const double tail = detail::poisson_tail(mean, cutoffs.max_a());
  if (tail > kLeakageCeiling)
    throw CutoffError("make_coherent_vacuum: tail mass " + std::to_string(tail) +
                      " beyond max_a=" + std::to_string(cutoffs.max_a()) + " exceeds ceiling");

  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(cutoffs.dimension());
  const double phase = std::arg(alpha);
  for (int n = 0; n < cutoffs.max_a(); ++n) {
    const double log_pmf = detail::poisson_log_pmf(mean, n);
    if (!std::isfinite(log_pmf)) continue;
    amps[cutoffs.index(n, 0)] = std::polar(std::exp(0.5 * log_pmf), n * phase);
  }
  amps /= amps.norm();
  return TwoModeState(cutoffs, std::move(amps), tail);
}

inline TwoModeState make_fock(int n_a, int n_b, const FockCutoffs& cutoffs) {
  if (!cutoffs.contains(n_a, n_b)) throw InvalidArgument("make_fock: occupation outside cutoffs");
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(cutoffs.dimension());
  amps[cutoffs.index(n_a, n_b)] = 1.0;
  return TwoModeState(cutoffs, std::move(amps));
}

/// Marginal photon-number distribution of one mode.
inline std::vector<double> number_distribution(const TwoModeState& state, Mode mode) {
  const auto& cut = state.cutoffs();
  std::vector<CompensatedSum<long double>> acc(static_cast<std::size_t>(cut.max(mode)));
  for (int n_a = 0; n_a < cut.max_a(); ++n_a) {
    for (int n_b = 0; n_b < cut.max_b(); ++n_b) {
      const std::size_t n = static_cast<std::size_t>(mode == Mode::A ? n_a : n_b);
      acc[n] += std::norm(state.amplitude(n_a, n_b));
    }
  }
  std::vector<double> pmf(acc.size());
  for (std::size_t n = 0; n < acc.size(); ++n) pmf[n] = static_cast<double>(acc[n].value());
  return pmf;
}

/// <N^(i)> = <N(N-1)...(N-i+1)> for i = 1..order().
struct FactorialMoments {
  Mode mode = Mode::A;
  std::vector<double> values;

  [[nodiscard]] int max_order() const { return static_cast<int>(values.size()); }
  [[nodiscard]] double mean() const { return order(1); }

  /// 1-based access; order 0 is the normalization (= 1).
  [[nodiscard]] double order(int i) const {
    if (i == 0) return 1.0;
    if (i < 0 || i > max_order())
      throw InvalidArgument("FactorialMoments: order " + std::to_string(i) + " not available");
    return values[static_cast<std::size_t>(i - 1)];
  }
};

/// Factorial moments of a photon-number pmf; falling-factorial weights are exact integers.
inline FactorialMoments factorial_moments_from_pmf(std::span<const double> pmf, int k_max,
                                                   Mode mode = Mode::A) {
  if (k_max < 1 || k_max > kMaxMomentOrder)
    throw InvalidArgument("factorial_moments: k_max must be in [1, " +
                          std::to_string(kMaxMomentOrder) + "]");
  FactorialMoments out{mode, std::vector<double>(static_cast<std::size_t>(k_max))};
  for (int i = 1; i <= k_max; ++i) {
    CompensatedSum<long double> sum;
    for (std::size_t n = static_cast<std::size_t>(i); n < pmf.size(); ++n)
      sum += static_cast<long double>(pmf[n]) * to_long_double(falling_factorial(n, i));
    out.values[static_cast<std::size_t>(i - 1)] = static_cast<double>(sum.value());
  }
  return out;
}

inline FactorialMoments factorial_moments(const TwoModeState& state, Mode mode, int k_max) {
  const auto pmf = number_distribution(state, mode);
  return factorial_moments_from_pmf(pmf, k_max, mode);
}

} // namespace nonclassic
