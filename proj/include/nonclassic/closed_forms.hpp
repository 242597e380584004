#pragma once

// Second-order short-time results for a coherent pump |alpha> and vacuum
// signal. lambda = |alpha|^2 and x = (g t)^2 throughout; every function
// depends on g and t only through their product.

#include <cmath>

#include "nonclassic/error.hpp"
#include "nonclassic/fock.hpp"

namespace nonclassic {

struct ShortTimeInput {
  double alpha_sq = 0.0;
  double g = 0.0;
  double t = 0.0;
  double gt_warn = 0.05;

  void validate() const {
    if (!std::isfinite(alpha_sq) || !std::isfinite(g) || !std::isfinite(t) || alpha_sq < 0 || g < 0 || t < 0)
      throw InvalidArgument("ShortTimeInput: alpha_sq, g and t must be finite and >= 0");
  }

  [[nodiscard]] double gt() const { return g * t; }
  [[nodiscard]] double gt_sq() const {
    const double x = gt();
    return x * x;
  }
  /// g t lambda^{3/2}: the dimensionless size of the neglected terms.
  [[nodiscard]] double expansion_parameter() const { return gt() * alpha_sq * std::sqrt(alpha_sq); }
  [[nodiscard]] bool outside_validity() const { return expansion_parameter() > gt_warn; }
};

/// Pump-mode <N>, <N^(2)>, <N^(3)> for five-wave mixing.
inline FactorialMoments moments_fwm(const ShortTimeInput& in) {
  in.validate();
  const double l = in.alpha_sq;
  const double x = in.gt_sq();
  const double l2 = l * l, l3 = l2 * l, l4 = l3 * l, l5 = l4 * l;
  return FactorialMoments{Mode::A,
                          {l - 6 * x * l3,
                           l2 - 12 * x * (l4 + l3),
                           l3 - 6 * x * (3 * l5 + 6 * l4 + 2 * l3)}};
}

namespace detail {
inline double lambda_cubed(const ShortTimeInput& in) { return in.alpha_sq * in.alpha_sq * in.alpha_sq; }
inline double lambda_fourth(const ShortTimeInput& in) { return lambda_cubed(in) * in.alpha_sq; }
} // namespace detail

inline double d1_fwm(const ShortTimeInput& in) {
  in.validate();
  return -12 * in.gt_sq() * detail::lambda_cubed(in);
}

inline double d2_fwm(const ShortTimeInput& in) {
  in.validate();
  return -12 * in.gt_sq() * (3 * detail::lambda_fourth(in) + detail::lambda_cubed(in));
}

inline double D2_fwm(const ShortTimeInput& in) {
  in.validate();
  return -48 * in.gt_sq() * detail::lambda_cubed(in);
}

inline double d1_thg(const ShortTimeInput& in) {
  in.validate();
  return -6 * in.gt_sq() * detail::lambda_cubed(in);
}

inline double d2_thg(const ShortTimeInput& in) {
  in.validate();
  return -6 * in.gt_sq() * (3 * detail::lambda_fourth(in) + detail::lambda_cubed(in));
}

inline double D2_thg(const ShortTimeInput& in) {
  in.validate();
  return -24 * in.gt_sq() * detail::lambda_cubed(in);
}

} // namespace nonclassic
