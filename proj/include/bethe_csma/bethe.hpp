#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "link_vector.hpp"
#include "numeric.hpp"

namespace bethe_csma {

/// Points with margin at or below this are treated as boundary points.
inline constexpr double kInteriorMargin = 1e-12;

/// A rate vector together with its position relative to the Bethe domain
/// D_B = { y >= 0, y_i + y_j <= 1 on edges }.
struct BetheDomainPoint {
  RateVector y;
  std::vector<double> slack;  // 1 - y_i - y_j, aligned with g.edges()
  double margin = 0.0;        // min over y_i, edge slacks, and 1 - y_i for isolated links

  bool interior() const { return margin > kInteriorMargin; }
};

inline BetheDomainPoint bethe_domain_point(const InterferenceGraph& g, const RateVector& y) {
  if (y.size() != g.size())
    throw PreconditionError("rate vector has " + std::to_string(y.size()) + " entries, graph has " +
                            std::to_string(g.size()) + " links");
  BetheDomainPoint p{y, {}, std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < y.size(); ++i) {
    p.margin = std::min(p.margin, y[i]);
    if (g.degree(i) == 0) p.margin = std::min(p.margin, 1.0 - y[i]);
  }
  p.slack.reserve(g.edge_count());
  for (const auto& [a, b] : g.edges()) {
    p.slack.push_back(1.0 - y[a] - y[b]);
    p.margin = std::min(p.margin, p.slack.back());
  }
  return p;
}

namespace detail {

inline std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

// Throws DomainError naming the first violated constraint. With `strict`,
// boundary points (margin <= kInteriorMargin) are rejected as well.
inline void check_domain(const InterferenceGraph& g, const RateVector& y, bool strict, const char* name) {
  if (y.size() != g.size())
    throw PreconditionError(std::string(name) + " has " + std::to_string(y.size()) + " entries, graph has " +
                            std::to_string(g.size()) + " links");
  const double floor = strict ? kInteriorMargin : 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i]))
      throw DomainError(std::string(name) + "[" + std::to_string(i) + "] is not finite");
    if (strict ? !(y[i] > floor) : !(y[i] >= 0.0))
      throw DomainError(std::string(name) + "[" + std::to_string(i) + "] = " + fmt(y[i]) +
                        (strict ? " must be > 0" : " must be >= 0"));
    if (strict ? !(1.0 - y[i] > floor) : !(y[i] <= 1.0))
      throw DomainError(std::string(name) + "[" + std::to_string(i) + "] = " + fmt(y[i]) +
                        (strict ? " must be < 1" : " must be <= 1"));
  }
  for (const auto& [a, b] : g.edges()) {
    const double slack = 1.0 - y[a] - y[b];
    if (strict ? !(slack > floor) : !(slack >= 0.0))
      throw DomainError("edge (" + std::to_string(a) + "," + std::to_string(b) + "): " + name + "[" +
                        std::to_string(a) + "] + " + name + "[" + std::to_string(b) + "] = " + fmt(y[a] + y[b]) +
                        (strict ? " must be < 1" : " must be <= 1"));
  }
}

}  // namespace detail

/// H_B(y) = sum_i [(d(i)-1)(1-y_i)log(1-y_i) - y_i log y_i]
///          - sum_{(i,j)} (1-y_i-y_j) log(1-y_i-y_j).
/// Boundary points are accepted under the 0 log 0 convention.
inline double bethe_entropy(const InterferenceGraph& g, const RateVector& y) {
  detail::check_domain(g, y, false, "y");
  double h = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = static_cast<double>(g.degree(i));
    h += (d - 1.0) * xlogx(1.0 - y[i]) - xlogx(y[i]);
  }
  for (const auto& [a, b] : g.edges()) h -= xlogx(1.0 - y[a] - y[b]);
  return h;
}

/// F_B(y; r) = -sum_i y_i r_i - H_B(y).
inline double bethe_free_energy(const InterferenceGraph& g, const RateVector& y, const IntensityVector& r) {
  if (r.size() != y.size()) throw PreconditionError("intensity and rate vectors differ in length");
  double energy = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) energy += y[i] * r[i];
  return -energy - bethe_entropy(g, y);
}

/// Gradient of F_B with respect to y at a strictly interior point:
///   -r_i + log y_i + (d(i)-1) log(1-y_i) - sum_{j in N(i)} log(1-y_i-y_j).
inline std::vector<double> bethe_gradient(const InterferenceGraph& g, const RateVector& y, const IntensityVector& r) {
  detail::check_domain(g, y, true, "y");
  if (r.size() != y.size()) throw PreconditionError("intensity and rate vectors differ in length");
  std::vector<double> grad(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    double stationary = std::log(y[i]) + (static_cast<double>(g.degree(i)) - 1.0) * std::log(1.0 - y[i]);
    for (auto j : g.neighbors(i)) stationary -= std::log(1.0 - y[i] - y[j]);
    grad[i] = -r[i] + stationary;
  }
  return grad;
}

}  // namespace bethe_csma
