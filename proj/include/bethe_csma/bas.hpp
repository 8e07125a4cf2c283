#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>

#include "bethe.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "link_vector.hpp"

namespace bethe_csma {

/// Intensity of a single link from its own target rate and its neighbours'.
/// Reads nothing but lambda_i and lambda_j for j in N(i).
inline double bas_link_intensity(const InterferenceGraph& g, const RateVector& lambda, std::size_t i) {
  double r = std::log(lambda[i]) + (static_cast<double>(g.degree(i)) - 1.0) * std::log(1.0 - lambda[i]);
  for (auto j : g.neighbors(i)) r -= std::log(1.0 - lambda[i] - lambda[j]);
  return r;
}

/// One-shot Bethe intensities:
///   r_i = log( lambda_i (1-lambda_i)^(d(i)-1) / prod_{j in N(i)} (1-lambda_i-lambda_j) ).
/// This makes lambda a zero-gradient point of F_B(.; r). Requires lambda
/// strictly inside D_B. An isolated link gets the logit of its rate.
inline IntensityVector bas_intensity(const InterferenceGraph& g, const RateVector& lambda) {
  detail::check_domain(g, lambda, true, "lambda");
  IntensityVector r(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) r[i] = bas_link_intensity(g, lambda, i);
  return r;
}

/// Largest epsilon such that lambda + epsilon stays strictly inside D_B.
inline double max_admissible_margin(const InterferenceGraph& g, const RateVector& lambda) {
  double eps = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lambda.size(); ++i)
    if (g.degree(i) == 0) eps = std::min(eps, 1.0 - lambda[i]);
  for (const auto& [a, b] : g.edges()) eps = std::min(eps, (1.0 - lambda[a] - lambda[b]) / 2.0);
  return eps;
}

/// bas_intensity(g, lambda + epsilon). Inflating the targets by a small margin
/// buys strict stability, lambda_i < s_i(r), when the Bethe error is small.
inline IntensityVector bas_with_margin(const InterferenceGraph& g, const RateVector& lambda, double epsilon) {
  if (lambda.size() != g.size())
    throw PreconditionError("lambda has " + std::to_string(lambda.size()) + " entries, graph has " +
                            std::to_string(g.size()) + " links");
  RateVector inflated = lambda;
  for (auto& v : inflated) v += epsilon;
  try {
    return bas_intensity(g, inflated);
  } catch (const DomainError& e) {
    throw DomainError(std::string("lambda + epsilon leaves the Bethe domain (") + e.what() +
                      "); epsilon must be < " + detail::fmt(max_admissible_margin(g, lambda)));
  }
}

}  // namespace bethe_csma
