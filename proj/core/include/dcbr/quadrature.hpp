#pragma once

#include <array>
#include <concepts>

namespace dcbr {

/// 3-point Gauss-Lobatto rule on [0, 1]: nodes {0, 1/2, 1}, weights
/// {1/6, 4/6, 1/6}. Exact for integrands of degree <= 3, which covers the
/// weighted Taylor remainders (1-s)q(s) with q quadratic.
struct GaussLobatto3 {
  static constexpr std::array<double, 3> nodes{0.0, 0.5, 1.0};
  static constexpr std::array<double, 3> weights{1.0 / 6.0, 4.0 / 6.0,
                                                 1.0 / 6.0};

  /// Integrates f over [0, 1].
  template <std::invocable<double> F>
  static double integrate(F&& f) {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      acc += weights[i] * f(nodes[i]);
    return acc;
  }

  /// Integrates the remainder kernel (1-s) f(s) over [0, 1].
  template <std::invocable<double> F>
  static double integrate_remainder(F&& f) {
    return integrate([&](double s) { return (1.0 - s) * f(s); });
  }
};

}  // namespace dcbr
