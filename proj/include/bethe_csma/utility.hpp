#pragma once

#include <cmath>
#include <string>

#include "errors.hpp"

namespace bethe_csma {

/// alpha-fair utility with weight beta:
///   U(x) = log x             if alpha == 1
///   U(x) = x^(1-a) / (1-a)   otherwise.
struct UtilitySpec {
  double alpha = 1.0;
  double beta = 1.0;

  void validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
      throw PreconditionError("utility alpha must be a finite value >= 0, got " + std::to_string(alpha));
    if (!(beta > 0.0) || !std::isfinite(beta))
      throw PreconditionError("utility beta must be a finite value > 0, got " + std::to_string(beta));
  }

  double value(double x) const {
    if (alpha == 1.0) return std::log(x);
    return std::pow(x, 1.0 - alpha) / (1.0 - alpha);
  }
  double derivative(double x) const { return alpha == 1.0 ? 1.0 / x : std::pow(x, -alpha); }
  double second_derivative(double x) const {
    return alpha == 1.0 ? -1.0 / (x * x) : -alpha * std::pow(x, -alpha - 1.0);
  }
  /// (U')^{-1}(z) = z^(-1/alpha); undefined for alpha == 0.
  double inverse_derivative(double z) const {
    if (alpha == 0.0) throw PreconditionError("U' is constant for alpha = 0 and has no inverse");
    return alpha == 1.0 ? 1.0 / z : std::pow(z, -1.0 / alpha);
  }

  /// beta > 2d/alpha, the regime where K_B is provably concave and BUM
  /// provably converges.
  bool in_convergence_regime(std::size_t max_degree) const {
    return alpha > 0.0 && beta > 2.0 * static_cast<double>(max_degree) / alpha;
  }
  bool concavity_guaranteed(std::size_t max_degree) const {
    return alpha > 0.0 && beta >= 2.0 * static_cast<double>(max_degree) / alpha;
  }
};

}  // namespace bethe_csma
