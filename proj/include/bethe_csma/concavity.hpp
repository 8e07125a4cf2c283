#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "bum.hpp"
#include "graph.hpp"
#include "link_vector.hpp"
#include "sampling.hpp"
#include "utility.hpp"

namespace bethe_csma {

/// Analytic Hessian of K_B:
///   diag   beta U''(y_i) + (d(i)-1)/(1-y_i) - 1/y_i - sum_j 1/(1-y_i-y_j)
///   (i,j)  -1/(1-y_i-y_j) on edges, 0 elsewhere.
inline Eigen::MatrixXd k_b_hessian(const InterferenceGraph& g, const RateVector& y, const UtilitySpec& u) {
  detail::check_domain(g, y, true, "y");
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    h(ii, ii) = u.beta * u.second_derivative(y[i]) + (static_cast<double>(g.degree(i)) - 1.0) / (1.0 - y[i]) -
                1.0 / y[i];
    for (auto j : g.neighbors(i)) {
      const double inv = 1.0 / (1.0 - y[i] - y[j]);
      h(ii, ii) -= inv;
      h(ii, static_cast<Eigen::Index>(j)) = -inv;
    }
  }
  return h;
}

/// Central-difference Jacobian of grad_k_b.
inline Eigen::MatrixXd k_b_hessian_fd(const InterferenceGraph& g, const RateVector& y, const UtilitySpec& u,
                                      double h = 1e-6) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Eigen::MatrixXd out(n, n);
  for (std::size_t j = 0; j < g.size(); ++j) {
    RateVector plus = y, minus = y;
    plus[j] += h;
    minus[j] -= h;
    const auto gp = grad_k_b(g, plus, u);
    const auto gm = grad_k_b(g, minus, u);
    for (std::size_t i = 0; i < g.size(); ++i)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (gp[i] - gm[i]) / (2.0 * h);
  }
  return out;
}

struct HessianReport {
  std::size_t points = 0;
  bool asserted = false;  // beta >= 2d/alpha, so negativity is required
  double max_eigenvalue = -std::numeric_limits<double>::infinity();
  double max_fd_error = 0.0;  // |fd - analytic| / max(1, |analytic|), entrywise
  std::size_t eigen_violations = 0;
  std::optional<RateVector> worst_point;
  double worst_eigenvalue = -std::numeric_limits<double>::infinity();

  static constexpr double kEigenTolerance = 1e-9;
  static constexpr double kFdTolerance = 1e-4;

  bool passed() const { return (!asserted || eigen_violations == 0) && max_fd_error <= kFdTolerance; }
};

/// Samples random interior points, computes the analytic Hessian's largest
/// eigenvalue, and compares every entry with finite differences of the
/// gradient. Below the concavity threshold the eigenvalues are reported only.
inline HessianReport hessian_check_k_b(const InterferenceGraph& g, const UtilitySpec& u, std::size_t points,
                                       std::uint64_t seed, double margin = 1e-2) {
  u.validate();
  HessianReport rep;
  rep.points = points;
  rep.asserted = u.concavity_guaranteed(g.max_degree());
  std::mt19937_64 rng(seed);
  for (std::size_t p = 0; p < points; ++p) {
    const auto y = random_interior_point(g, rng, margin);
    const auto h = k_b_hessian(g, y, u);
    const double top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(h, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    if (top > rep.max_eigenvalue) {
      rep.max_eigenvalue = top;
      rep.worst_point = y;
    }
    if (top > HessianReport::kEigenTolerance) ++rep.eigen_violations;
    const auto fd = k_b_hessian_fd(g, y, u);
    const double err = ((fd - h).array().abs() / h.array().abs().max(1.0)).maxCoeff();
    rep.max_fd_error = std::max(rep.max_fd_error, err);
  }
  rep.worst_eigenvalue = rep.max_eigenvalue;
  return rep;
}

}  // namespace bethe_csma
