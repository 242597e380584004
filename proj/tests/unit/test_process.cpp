#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "nonclassic/evolution.hpp"
#include "nonclassic/process.hpp"
#include "nonclassic/verify/oracles.hpp"

using namespace nonclassic;

TEST(ProcessSpec, Presets) {
  const auto fwm = ProcessSpec::five_wave_mixing(0.1);
  EXPECT_EQ(fwm.m, 3);
  EXPECT_EQ(fwm.n, 2);
  EXPECT_DOUBLE_EQ(fwm.omega2, 1.5);
  EXPECT_TRUE(fwm.is_resonant());
  const auto thg = ProcessSpec::third_harmonic(0.1, 2.0);
  EXPECT_EQ(thg.n, 1);
  EXPECT_DOUBLE_EQ(thg.omega2, 6.0);
  EXPECT_TRUE(thg.is_resonant());
  EXPECT_FALSE((ProcessSpec{1.0, 1.0, 0.1, 3, 2, ""}).is_resonant());
}

TEST(ProcessSpec, Validation) {
  EXPECT_THROW(build_hamiltonian({1.0, 1.0, -0.1, 1, 1, ""}, FockCutoffs(3, 3)), InvalidArgument);
  EXPECT_THROW(build_hamiltonian({NAN, 1.0, 0.1, 1, 1, ""}, FockCutoffs(3, 3)), InvalidArgument);
  EXPECT_THROW(build_hamiltonian({1.0, 1.0, 0.1, 7, 1, ""}, FockCutoffs(3, 3)), InvalidArgument);
  EXPECT_THROW(build_hamiltonian({1.0, 1.0, 0.1, 1, 0, ""}, FockCutoffs(3, 3)), InvalidArgument);
}

TEST(Hamiltonian, FreePartIsDiagonal) {
  const FockCutoffs cut(5, 4);
  const auto h = build_hamiltonian(ProcessSpec::five_wave_mixing(0.0), cut);
  const auto dense = h.dense();
  for (Eigen::Index i = 0; i < dense.rows(); ++i)
    for (Eigen::Index j = 0; j < dense.cols(); ++j) {
      if (i != j) {
        EXPECT_EQ(dense(i, j), std::complex<double>(0.0));
      } else {
        const auto [a, b] = cut.occupation(i);
        EXPECT_DOUBLE_EQ(dense(i, i).real(), a + 1.5 * b);
      }
    }
}

TEST(Hamiltonian, LadderElements) {
  const double g = 0.3;
  const FockCutoffs cut(6, 4);
  const auto fwm = build_hamiltonian(ProcessSpec::five_wave_mixing(g), cut);
  EXPECT_NEAR(fwm.element(cut.index(0, 2), cut.index(3, 0)).real(), g * std::sqrt(12.0), 1e-15);
  EXPECT_NEAR(fwm.element(cut.index(3, 0), cut.index(0, 2)).real(), g * std::sqrt(12.0), 1e-15);
  const auto thg = build_hamiltonian(ProcessSpec::third_harmonic(g), cut);
  EXPECT_NEAR(thg.element(cut.index(0, 1), cut.index(3, 0)).real(), g * std::sqrt(6.0), 1e-15);
}

TEST(Hamiltonian, ElementsMatchRepeatedLadderApplication) {
  for (int m = 1; m <= 3; ++m)
    for (int n = 1; n <= 3; ++n) {
      const ProcessSpec spec{1.0, static_cast<double>(m) / n, 1.0, m, n, ""};
      const FockCutoffs cut(6, 6);
      const auto h = build_hamiltonian(spec, cut);
      for (int a = 0; a < 6; ++a)
        for (int b = 0; b < 6; ++b) {
          if (!cut.contains(a - m, b + n)) continue;
          const double ladder = oracle::ladder_matrix_element(a, b, m, n);
          const auto weight = interaction_weight(a, b, m, n);
          EXPECT_NEAR(ladder * ladder, static_cast<double>(weight), 1e-9 * static_cast<double>(weight));
          EXPECT_NEAR(h.element(cut.index(a - m, b + n), cut.index(a, b)).real(), ladder, 1e-12 * ladder);
        }
    }
}

TEST(Hamiltonian, HermitianAndSelectionRule) {
  std::mt19937_64 rng(17);
  std::uniform_int_distribution<int> order(1, 4), cutoff(2, 9);
  std::uniform_real_distribution<double> coupling(0.0, 2.0), freq(0.1, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    const ProcessSpec spec{freq(rng), freq(rng), coupling(rng), order(rng), order(rng), ""};
    const FockCutoffs cut(cutoff(rng), cutoff(rng));
    const auto h = build_hamiltonian(spec, cut);
    EXPECT_TRUE(h.is_hermitian());
    const auto& sparse = h.sparse();
    for (Eigen::Index col = 0; col < sparse.outerSize(); ++col)
      for (HamiltonianMatrix::Sparse::InnerIterator it(sparse, col); it; ++it) {
        if (it.row() == it.col()) continue;
        const auto [ra, rb] = cut.occupation(it.row());
        const auto [ca, cb] = cut.occupation(it.col());
        const bool down = ra - ca == -spec.m && rb - cb == spec.n;
        const bool up = ra - ca == spec.m && rb - cb == -spec.n;
        EXPECT_TRUE(down || up);
      }
    EXPECT_EQ(charge_commutator_norm(h), 0.0);
  }
}

TEST(ConservedCharge, PresetBookkeeping) {
  const FockCutoffs cut(5, 4);
  const auto q5 = conserved_charge(ProcessSpec::five_wave_mixing(0.1), cut);
  EXPECT_EQ(q5[cut.index(3, 0)], 6.0);
  EXPECT_EQ(q5[cut.index(0, 2)], 6.0);
  const auto q3 = conserved_charge(ProcessSpec::third_harmonic(0.1), cut);
  EXPECT_EQ(q3[cut.index(3, 0)], 3.0);
  EXPECT_EQ(q3[cut.index(0, 1)], 3.0);
}

TEST(ConservedCharge, ExplicitCommutatorVanishes) {
  for (const auto& spec : {ProcessSpec::five_wave_mixing(0.7), ProcessSpec::third_harmonic(0.7)}) {
    const FockCutoffs cut(12, 8);
    const auto h = build_hamiltonian(spec, cut);
    const Eigen::MatrixXcd dense = h.dense();
    const Eigen::MatrixXcd q = conserved_charge(spec, cut).cast<std::complex<double>>().asDiagonal();
    const Eigen::MatrixXcd commutator = dense * q - q * dense;
    for (Eigen::Index i = 0; i < commutator.rows(); ++i) {
      const auto [a, b] = cut.occupation(i);
      if (a >= cut.max_a() - spec.m || b >= cut.max_b() - spec.n) continue;  // interior rows
      EXPECT_EQ(commutator.row(i).norm(), 0.0);
    }
    EXPECT_EQ(commutator.norm(), 0.0);
  }
}

TEST(ConservedCharge, BlockPermutationIsBlockDiagonal) {
  for (const auto& spec : {ProcessSpec::five_wave_mixing(0.2), ProcessSpec::third_harmonic(0.2)}) {
    const FockCutoffs cut(10, 7);
    const auto h = build_hamiltonian(spec, cut);
    const ChargeBlockSpectrum spectrum(h);
    EXPECT_GT(spectrum.block_count(), 1u);
    EXPECT_LT(spectrum.largest_block(), static_cast<std::size_t>(cut.dimension()));
  }
}

TEST(Hamiltonian, Warnings) {
  EXPECT_TRUE(build_hamiltonian(ProcessSpec::five_wave_mixing(0.1), FockCutoffs(6, 4)).warnings().empty());
  EXPECT_EQ(build_hamiltonian({1.0, 1.0, 0.1, 3, 2, ""}, FockCutoffs(6, 4)).warnings().size(), 1u);
  const auto tiny = build_hamiltonian(ProcessSpec::five_wave_mixing(0.1), FockCutoffs(3, 2));
  ASSERT_EQ(tiny.warnings().size(), 1u);
  EXPECT_EQ(tiny.sparse().nonZeros(), 6);
}

TEST(Hamiltonian, CoordinateDump) {
  std::ostringstream out;
  build_hamiltonian(ProcessSpec::third_harmonic(0.5), FockCutoffs(4, 2)).write_coordinate(out);
  const std::string text = out.str();
  EXPECT_NE(text.find("# dimension 8 nonzeros 10"), std::string::npos);
  // <0,1|H|3,0> = g sqrt(6)
  EXPECT_NE(text.find("1 6 1.2247448713915889 0"), std::string::npos);
}
