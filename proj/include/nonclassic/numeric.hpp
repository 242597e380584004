#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

#include "nonclassic/error.hpp"

namespace nonclassic {

using uint128 = unsigned __int128;
using int128 = __int128;

/// Neumaier-compensated accumulator.
template <typename Real>
class CompensatedSum {
public:
  void add(Real x) {
    const Real t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      compensation_ += (sum_ - t) + x;
    else
      compensation_ += (x - t) + sum_;
    sum_ = t;
  }

  CompensatedSum& operator+=(Real x) {
    add(x);
    return *this;
  }

  [[nodiscard]] Real value() const { return sum_ + compensation_; }

private:
  Real sum_ = 0;
  Real compensation_ = 0;
};

/// n (n-1) ... (n-order+1) in exact 128-bit arithmetic; zero when order > n.
inline uint128 falling_factorial(std::uint64_t n, int order) {
  if (order < 0) throw InvalidArgument("falling_factorial: negative order");
  uint128 result = 1;
  for (int j = 0; j < order; ++j) {
    if (n < static_cast<std::uint64_t>(j) + 1) return 0;
    const uint128 factor = n - static_cast<std::uint64_t>(j);
    if (__builtin_mul_overflow(result, factor, &result))
      throw InvalidArgument("falling_factorial: 128-bit overflow");
  }
  return result;
}

/// (n+1)(n+2)...(n+order): the weight picked up by `order` creation operators.
inline uint128 rising_factorial_from(std::uint64_t n, int order) {
  if (order < 0) throw InvalidArgument("rising_factorial_from: negative order");
  uint128 result = 1;
  for (int j = 1; j <= order; ++j) {
    const uint128 factor = n + static_cast<std::uint64_t>(j);
    if (__builtin_mul_overflow(result, factor, &result))
      throw InvalidArgument("rising_factorial_from: 128-bit overflow");
  }
  return result;
}

inline long double to_long_double(uint128 x) { return static_cast<long double>(x); }

inline bool all_finite(double x) { return std::isfinite(x); }

} // namespace nonclassic
