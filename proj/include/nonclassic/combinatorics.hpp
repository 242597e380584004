#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nonclassic/error.hpp"

namespace nonclassic {

/// Default bound on n for Stirling numbers and binomials used by the criteria.
inline constexpr int kMaxStirlingOrder = 20;

/// Exact Stirling numbers of the second kind S2(n, k), 0 <= k <= n <= max_n,
/// filled from S2(n, k) = k S2(n-1, k) + S2(n-1, k-1).
class StirlingTable {
public:
  explicit StirlingTable(int max_n = kMaxStirlingOrder) : max_n_(max_n) {
    if (max_n < 0 || max_n > 25) throw InvalidArgument("StirlingTable: max_n must be in [0, 25]");
    rows_.resize(static_cast<std::size_t>(max_n) + 1);
    rows_[0] = {1};
    for (int n = 1; n <= max_n; ++n) {
      auto& row = rows_[static_cast<std::size_t>(n)];
      const auto& prev = rows_[static_cast<std::size_t>(n - 1)];
      row.assign(static_cast<std::size_t>(n) + 1, 0);
      for (int k = 1; k <= n; ++k) {
        const std::uint64_t keep = k < n ? static_cast<std::uint64_t>(k) * prev[static_cast<std::size_t>(k)] : 0;
        row[static_cast<std::size_t>(k)] = keep + prev[static_cast<std::size_t>(k - 1)];
      }
    }
  }

  [[nodiscard]] int max_n() const { return max_n_; }

  [[nodiscard]] std::uint64_t operator()(int n, int k) const {
    if (n < 0 || k < 0 || k > n || n > max_n_)
      throw InvalidArgument("stirling2: indices (" + std::to_string(n) + ", " + std::to_string(k) +
                            ") outside 0 <= k <= n <= " + std::to_string(max_n_));
    return rows_[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
  }

private:
  int max_n_;
  std::vector<std::vector<std::uint64_t>> rows_;
};

inline const StirlingTable& stirling_table() {
  static const StirlingTable table(kMaxStirlingOrder);
  return table;
}

inline std::uint64_t stirling2(int n, int k) { return stirling_table()(n, k); }

/// Exact binomial coefficient; n <= 62 keeps every intermediate in 64 bits.
inline std::uint64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n || n > 62)
    throw InvalidArgument("binomial: indices out of range");
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (int j = 1; j <= k; ++j) result = result * static_cast<std::uint64_t>(n - k + j) / static_cast<std::uint64_t>(j);
  return result;
}

} // namespace nonclassic
