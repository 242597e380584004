#include <gtest/gtest.h>

#include "nonclassic/combinatorics.hpp"
#include "nonclassic/verify/oracles.hpp"

using namespace nonclassic;

TEST(Stirling2, BoundaryIdentities) {
  EXPECT_EQ(stirling2(0, 0), 1u);
  for (int n = 1; n <= kMaxStirlingOrder; ++n) {
    EXPECT_EQ(stirling2(n, n), 1u);
    EXPECT_EQ(stirling2(n, 1), 1u);
    EXPECT_EQ(stirling2(n, 0), 0u);
  }
}

TEST(Stirling2, SmallValuesMatchPartitionEnumeration) {
  // Oracle: partitions of {1..4} into 2 blocks, counted by enumeration.
  EXPECT_EQ(oracle::count_set_partitions(4)[2], 7u);
  EXPECT_EQ(stirling2(4, 2), 7u);
  EXPECT_EQ(stirling2(5, 3), 25u);
  for (int n = 0; n <= 10; ++n) {
    const auto counts = oracle::count_set_partitions(n);
    for (int k = 0; k <= n; ++k) EXPECT_EQ(stirling2(n, k), counts[static_cast<std::size_t>(k)]) << n << "," << k;
  }
}

TEST(Stirling2, RecurrenceHoldsForWholeTable) {
  const StirlingTable table(22);
  for (int n = 1; n <= 22; ++n)
    for (int k = 1; k <= n; ++k) {
      const std::uint64_t keep = k < n ? static_cast<std::uint64_t>(k) * table(n - 1, k) : 0;
      EXPECT_EQ(table(n, k), keep + table(n - 1, k - 1));
    }
  // Bell(20) as a checksum on the largest default row
  std::uint64_t bell = 0;
  for (int k = 0; k <= 20; ++k) bell += table(20, k);
  EXPECT_EQ(bell, 51724158235372ULL);
}

TEST(Stirling2, OutOfRange) {
  EXPECT_THROW(stirling2(3, 4), InvalidArgument);
  EXPECT_THROW(stirling2(-1, 0), InvalidArgument);
  EXPECT_THROW(stirling2(kMaxStirlingOrder + 1, 1), InvalidArgument);
}

TEST(Binomial, PascalRows) {
  EXPECT_EQ(binomial(5, 2), 10u);
  EXPECT_EQ(binomial(20, 10), 184756u);
  for (int n = 1; n <= 30; ++n)
    for (int k = 1; k < n; ++k) EXPECT_EQ(binomial(n, k), binomial(n - 1, k - 1) + binomial(n - 1, k));
  EXPECT_THROW(binomial(3, 5), InvalidArgument);
}
