#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "nonclassic/fock.hpp"

namespace nonclassic::fixtures {

/// Geometric (thermal) pmf with the given mean, truncated to `count` entries.
inline std::vector<double> thermal_pmf(double mean, int count) {
  std::vector<double> pmf(static_cast<std::size_t>(count));
  const double ratio = mean / (1.0 + mean);
  double p = 1.0 / (1.0 + mean);
  for (auto& x : pmf) {
    x = p;
    p *= ratio;
  }
  return pmf;
}

/// Normalized state with independent Gaussian real/imag amplitudes.
inline TwoModeState random_state(std::mt19937_64& rng, const FockCutoffs& cutoffs) {
  std::normal_distribution<double> normal;
  Eigen::VectorXcd amps(cutoffs.dimension());
  for (auto& a : amps) a = {normal(rng), normal(rng)};
  return TwoModeState::normalized(cutoffs, std::move(amps));
}

} // namespace nonclassic::fixtures
