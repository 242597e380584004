#pragma once

// Higher-order antibunching d(l) and higher-order sub-Poissonian D(l-1)
// criteria. Everything here consumes FactorialMoments, so analytic,
// simulated and synthetic moments share one code path. A negative value
// signals the nonclassical effect; the magnitude is the depth.

#include <cmath>
#include <cstdint>
#include <map>
#include <string>

#include "nonclassic/combinatorics.hpp"
#include "nonclassic/error.hpp"
#include "nonclassic/fock.hpp"
#include "nonclassic/numeric.hpp"

namespace nonclassic {

namespace detail {

inline void require_orders(const FactorialMoments& moments, int needed, const char* who) {
  if (moments.max_order() < needed)
    throw InvalidArgument(std::string(who) + ": needs factorial moments up to order " +
                          std::to_string(needed) + ", have " + std::to_string(moments.max_order()));
}

inline long double ipow(long double x, int k) {
  long double r = 1;
  for (int j = 0; j < k; ++j) r *= x;
  return r;
}

} // namespace detail

/// d(l) = <N^(l+1)> - <N>^(l+1). l = 1 is ordinary antibunching.
inline double hoa_d(const FactorialMoments& moments, int l) {
  if (l < 1) throw InvalidArgument("hoa_d: l must be >= 1");
  detail::require_orders(moments, l + 1, "hoa_d");
  const long double mean = moments.mean();
  return static_cast<double>(static_cast<long double>(moments.order(l + 1)) - detail::ipow(mean, l + 1));
}

/// D(l-1) as the difference of two double sums over k and i with weights
/// C(l,k) (-1)^k S2(l-k, i): the first uses <N^(i)><N>^k, the second <N>^(k+i).
/// Equivalently the l-th central moment minus that of a Poisson with equal mean.
inline double hosps_D(const FactorialMoments& moments, int l) {
  if (l < 2) throw InvalidArgument("hosps_D: l must be >= 2");
  const auto& table = stirling_table();
  if (l > table.max_n()) throw InvalidArgument("hosps_D: l exceeds Stirling table bound");
  detail::require_orders(moments, l, "hosps_D");

  const long double mean = moments.mean();
  CompensatedSum<long double> observed;
  CompensatedSum<long double> poisson;
  for (int k = 0; k <= l; ++k) {
    const int sign = (k % 2 == 0) ? 1 : -1;
    const auto binom = static_cast<std::int64_t>(binomial(l, k));
    const long double mean_k = detail::ipow(mean, k);
    for (int i = 0; i <= l - k; ++i) {
      const auto s2 = static_cast<std::int64_t>(table(l - k, i));
      if (s2 == 0) continue;
      const long double weight = static_cast<long double>(sign * binom * s2);
      observed += weight * static_cast<long double>(moments.order(i)) * mean_k;
      poisson += weight * detail::ipow(mean, k + i);
    }
  }
  return static_cast<double>(observed.value() - poisson.value());
}

/// D(2) = <N^(3)> + 2<N>^3 - 3<N^(2)><N> + 3<N^(2)> - 3<N>^2, evaluated term by term.
inline double hosps_D2_special(const FactorialMoments& moments) {
  detail::require_orders(moments, 3, "hosps_D2_special");
  const long double n1 = moments.order(1);
  const long double n2 = moments.order(2);
  const long double n3 = moments.order(3);
  CompensatedSum<long double> sum;
  sum += n3;
  sum += 2 * n1 * n1 * n1;
  sum += -3 * n2 * n1;
  sum += 3 * n2;
  sum += -3 * n1 * n1;
  return static_cast<double>(sum.value());
}

struct CriterionReport {
  Mode mode = Mode::A;
  double time = 0.0;
  std::map<int, double> d_values;  // l -> d(l)
  std::map<int, double> D_values;  // l-1 -> D(l-1)
  double leakage = 0.0;
};

/// d(1..l_max) and D(1..l_max-1) from precomputed moments (orders up to l_max+1).
inline CriterionReport report(const FactorialMoments& moments, double time, int l_max,
                              double leakage = 0.0) {
  if (l_max < 1) throw InvalidArgument("report: l_max must be >= 1");
  CriterionReport out{moments.mode, time, {}, {}, leakage};
  for (int l = 1; l <= l_max; ++l) out.d_values[l] = hoa_d(moments, l);
  for (int l = 2; l <= l_max; ++l) out.D_values[l - 1] = hosps_D(moments, l);
  return out;
}

inline CriterionReport report(const TwoModeState& state, Mode mode, double time, int l_max) {
  if (l_max < 1 || l_max + 1 > kMaxMomentOrder)
    throw InvalidArgument("report: l_max + 1 must lie within the moment-order bound");
  return report(factorial_moments(state, mode, l_max + 1), time, l_max, state.leakage());
}

} // namespace nonclassic
