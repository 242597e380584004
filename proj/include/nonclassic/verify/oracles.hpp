#pragma once

// Brute-force reference computations. None of these share code with the
// library paths they check: partitions are enumerated, central moments are
// summed directly from a pmf, and ladder-operator elements are obtained by
// applying a and b^+ one quantum at a time.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace nonclassic::oracle {

/// counts[k] = number of partitions of an n-set into k nonempty blocks,
/// by enumerating restricted growth strings.
inline std::vector<std::uint64_t> count_set_partitions(int n) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(n) + 1, 0);
  if (n == 0) {
    counts[0] = 1;
    return counts;
  }
  std::vector<int> label(static_cast<std::size_t>(n), 0);
  std::vector<int> prefix_max(static_cast<std::size_t>(n), 0);
  while (true) {
    ++counts[static_cast<std::size_t>(prefix_max[static_cast<std::size_t>(n - 1)] + 1)];
    int pos = n - 1;
    while (pos > 0 && label[static_cast<std::size_t>(pos)] > prefix_max[static_cast<std::size_t>(pos - 1)]) --pos;
    if (pos == 0) break;
    ++label[static_cast<std::size_t>(pos)];
    prefix_max[static_cast<std::size_t>(pos)] =
        std::max(prefix_max[static_cast<std::size_t>(pos - 1)], label[static_cast<std::size_t>(pos)]);
    for (int j = pos + 1; j < n; ++j) {
      label[static_cast<std::size_t>(j)] = 0;
      prefix_max[static_cast<std::size_t>(j)] = prefix_max[static_cast<std::size_t>(pos)];
    }
  }
  return counts;
}

inline long double pmf_mean(std::span<const double> pmf) {
  long double mean = 0;
  for (std::size_t n = 0; n < pmf.size(); ++n) mean += static_cast<long double>(n) * pmf[n];
  return mean;
}

/// sum_n p(n) n^j
inline long double raw_moment(std::span<const double> pmf, int j) {
  long double sum = 0;
  for (std::size_t n = 0; n < pmf.size(); ++n) sum += pmf[n] * std::pow(static_cast<long double>(n), j);
  return sum;
}

/// sum_n p(n) (n - mean)^l
inline long double central_moment(std::span<const double> pmf, int l) {
  const long double mean = pmf_mean(pmf);
  long double sum = 0;
  for (std::size_t n = 0; n < pmf.size(); ++n) sum += pmf[n] * std::pow(static_cast<long double>(n) - mean, l);
  return sum;
}

/// Poisson(mean) pmf on 0..count-1 from the multiplicative recurrence.
inline std::vector<double> poisson_pmf(double mean, int count) {
  std::vector<double> pmf(static_cast<std::size_t>(count), 0.0);
  long double p = std::exp(-static_cast<long double>(mean));
  for (int n = 0; n < count; ++n) {
    pmf[static_cast<std::size_t>(n)] = static_cast<double>(p);
    p *= static_cast<long double>(mean) / (n + 1);
  }
  return pmf;
}

/// l-th central moment of Poisson(mean), summed far into the tail.
inline long double poisson_central_moment(double mean, int l) {
  const int count = static_cast<int>(mean + 30.0 * std::sqrt(mean + 1.0) + 60.0);
  long double p = std::exp(-static_cast<long double>(mean));
  long double sum = 0;
  for (int n = 0; n < count; ++n) {
    sum += p * std::pow(static_cast<long double>(n) - mean, l);
    p *= static_cast<long double>(mean) / (n + 1);
  }
  return sum;
}

/// Random pmf with support length in [1, max_support]; some weights are zeroed.
template <typename Rng>
std::vector<double> random_pmf(Rng& rng, int max_support) {
  std::uniform_int_distribution<int> support(1, max_support);
  std::uniform_real_distribution<double> weight(0.0, 1.0);
  std::bernoulli_distribution keep(0.8);
  std::vector<double> pmf(static_cast<std::size_t>(support(rng)));
  double total = 0;
  for (auto& p : pmf) {
    p = keep(rng) ? weight(rng) : 0.0;
    total += p;
  }
  if (total == 0) {
    pmf.back() = 1.0;
    total = 1.0;
  }
  for (auto& p : pmf) p /= total;
  return pmf;
}

/// <n_a - m, n_b + n| a^m (b^+)^n |n_a, n_b> by applying one ladder step at a
/// time: a|k> = sqrt(k)|k-1>, b^+|k> = sqrt(k+1)|k+1>.
inline double ladder_matrix_element(int n_a, int n_b, int m, int n) {
  double amplitude = 1.0;
  int a = n_a;
  for (int s = 0; s < m; ++s) {
    if (a == 0) return 0.0;
    amplitude *= std::sqrt(static_cast<double>(a));
    --a;
  }
  int b = n_b;
  for (int s = 0; s < n; ++s) {
    amplitude *= std::sqrt(static_cast<double>(b + 1));
    ++b;
  }
  return amplitude;
}

} // namespace nonclassic::oracle
