#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bas.hpp"
#include "bethe.hpp"
#include "bum.hpp"
#include "concavity.hpp"
#include "graph.hpp"
#include "oracle.hpp"
#include "sampling.hpp"
#include "sim.hpp"

namespace bethe_csma {

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double tolerance = 0.0;
};

using ScalarField = std::function<double(const RateVector&)>;
using GradientField = std::function<std::vector<double>(const RateVector&)>;

/// Max over random interior points and coordinates of
/// |central difference - analytic| / max(1, |analytic|).
inline double max_gradient_fd_error(const InterferenceGraph& g, const ScalarField& f, const GradientField& grad,
                                    std::size_t points, std::uint64_t seed, double h = 1e-6) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t p = 0; p < points; ++p) {
    const auto y = random_interior_point(g, rng, 1e-2);
    const auto analytic = grad(y);
    for (std::size_t i = 0; i < y.size(); ++i) {
      RateVector plus = y, minus = y;
      plus[i] += h;
      minus[i] -= h;
      const double fd = (f(plus) - f(minus)) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - analytic[i]) / std::max(1.0, std::abs(analytic[i])));
    }
  }
  return worst;
}

inline CheckResult check_gradient_fd(std::string name, const InterferenceGraph& g, const ScalarField& f,
                                     const GradientField& grad, std::size_t points, std::uint64_t seed,
                                     double tolerance = 1e-5) {
  const double err = max_gradient_fd_error(g, f, grad, points, seed);
  return {std::move(name), err < tolerance, err, tolerance};
}

/// A spread of small graphs used by the randomized checks.
inline InterferenceGraph random_test_graph(std::mt19937_64& rng, std::size_t index) {
  std::uniform_int_distribution<std::size_t> size(3, 12);
  const std::size_t n = size(rng);
  switch (index % 5) {
    case 0: return complete_graph(std::min<std::size_t>(n, 8));
    case 1: return ring_graph(n);
    case 2: return star_graph(n);
    case 3: return grid_graph(3, std::max<std::size_t>(n / 3, 1));
    default: return random_graph(n, 0.3, rng());
  }
}

/// || grad F_B(lambda; BAS(lambda)) ||_inf over random (graph, lambda) pairs.
inline CheckResult check_bas_zero_gradient(std::uint64_t seed, std::size_t pairs = 50) {
  std::mt19937_64 rng(seed);
  double worst = 0.0;
  for (std::size_t k = 0; k < pairs; ++k) {
    const auto g = random_test_graph(rng, k);
    const auto lambda = random_interior_point(g, rng, 1e-3);
    const auto grad = bethe_gradient(g, lambda, bas_intensity(g, lambda));
    for (double v : grad) worst = std::max(worst, std::abs(v));
  }
  return {"bas_zero_gradient", worst <= 1e-12, worst, 1e-12};
}

/// On trees the Bethe intensities reproduce the target rates exactly.
inline CheckResult check_tree_exactness(std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<InterferenceGraph> trees{star_graph(5)};
  std::uniform_int_distribution<std::size_t> size(4, 10);
  for (int k = 0; k < 3; ++k) trees.push_back(random_tree(size(rng), rng()));
  double worst = 0.0;
  for (const auto& g : trees) {
    const auto lambda = random_interior_point(g, rng, 1e-2);
    const auto s = service_rates(g, bas_intensity(g, lambda));
    for (std::size_t i = 0; i < g.size(); ++i) worst = std::max(worst, std::abs(s[i] - lambda[i]));
  }
  return {"tree_exactness", worst <= 1e-9, worst, 1e-9};
}

inline IntensityVector random_intensity(std::size_t n, std::mt19937_64& rng, double lo = -2.0, double hi = 2.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  IntensityVector r(n);
  for (auto& v : r) v = dist(rng);
  return r;
}

/// Gibbs variational principle; `measured` is the worst shortfall
/// max(0, F_G(pi) - F_G(nu)) combined with the -log Z identity error.
inline std::vector<CheckResult> check_gibbs_variational(const std::string& label, const InterferenceGraph& g,
                                                        std::uint64_t seed, std::size_t trials = 1000) {
  std::mt19937_64 rng(seed);
  const auto r = random_intensity(g.size(), rng);
  const auto rep = verify_gibbs_variational(g, r, trials, rng());
  return {{"gibbs_variational_" + label, rep.violations == 0, std::max(0.0, -rep.min_excess),
           GibbsVariationalReport::kExcessTolerance},
          {"gibbs_log_partition_" + label, rep.identity_error <= GibbsVariationalReport::kIdentityTolerance,
           rep.identity_error, GibbsVariationalReport::kIdentityTolerance}};
}

inline std::vector<CheckResult> check_hessian(const InterferenceGraph& g, const UtilitySpec& u, std::size_t points,
                                              std::uint64_t seed) {
  const auto rep = hessian_check_k_b(g, u, points, seed);
  std::vector<CheckResult> out;
  if (rep.asserted)
    out.push_back({"k_b_hessian_max_eigenvalue", rep.eigen_violations == 0, rep.max_eigenvalue,
                   HessianReport::kEigenTolerance});
  out.push_back({"k_b_hessian_fd", rep.max_fd_error <= HessianReport::kFdTolerance, rep.max_fd_error,
                 HessianReport::kFdTolerance});
  return out;
}

/// Largest |s_hat - s| measured in batch-means standard errors.
inline CheckResult check_sim_vs_oracle(const std::string& label, const InterferenceGraph& g, const IntensityVector& r,
                                       double duration, std::uint64_t seed, double sigmas) {
  const auto rep = estimate_vs_oracle(g, r, duration, seed, sigmas);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    worst = std::max(worst, rep.standard_error[i] > 0 ? rep.deviation[i] / rep.standard_error[i] : 0.0);
  return {"sim_vs_oracle_" + label, rep.all_within(), worst, sigmas};
}

/// Every BUM iterate stays strictly inside D_B and above the running min of c1.
inline CheckResult check_bum_interior(const InterferenceGraph& g, const UtilitySpec& u, std::size_t horizon) {
  const auto sched = default_projection_schedule();
  const auto trace = bum_run(g, u, sched, horizon);
  double worst = std::numeric_limits<double>::infinity();
  double min_c1 = std::numeric_limits<double>::infinity();
  bool ok = true;
  for (const auto& rec : trace.records) {
    if (rec.t > 1) {
      for (double v : rec.y.values()) ok = ok && v >= min_c1 * (1.0 - 1e-12);
    }
    min_c1 = std::min(min_c1, sched.c1(static_cast<double>(rec.t)));
    const auto p = bethe_domain_point(g, rec.y);
    worst = std::min(worst, p.margin);
    ok = ok && p.interior();
  }
  return {"bum_interior", ok, worst, kInteriorMargin};
}

/// The full invariant suite run by `verify`. Tolerances are wide enough that
/// Monte-Carlo checks give the same verdict across seeds.
inline std::vector<CheckResult> run_verify_suite(std::uint64_t seed) {
  std::vector<CheckResult> out;
  auto append = [&](std::vector<CheckResult> v) { out.insert(out.end(), v.begin(), v.end()); };
  append(check_gibbs_variational("K3", complete_graph(3), seed));
  append(check_gibbs_variational("path4", path_graph(4), seed + 1));
  out.push_back(check_bas_zero_gradient(seed));
  out.push_back(check_tree_exactness(seed));

  const UtilitySpec unit{1.0, 1.0};
  for (const auto& [label, g] : std::vector<std::pair<std::string, InterferenceGraph>>{
           {"K3", complete_graph(3)}, {"ring5", ring_graph(5)}, {"star5", star_graph(5)}}) {
    std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
    const auto r = random_intensity(g.size(), rng);
    out.push_back(check_gradient_fd(
        "bethe_gradient_fd_" + label, g, [&](const RateVector& y) { return bethe_free_energy(g, y, r); },
        [&](const RateVector& y) { return bethe_gradient(g, y, r); }, 100, seed));
    out.push_back(check_gradient_fd(
        "k_b_gradient_fd_" + label, g, [&](const RateVector& y) { return k_b(g, y, unit); },
        [&](const RateVector& y) { return grad_k_b(g, y, unit); }, 100, seed));
  }

  const auto star = star_graph(5);
  append(check_hessian(star, UtilitySpec{1.0, 8.0}, 200, seed));

  {
    std::mt19937_64 rng(seed + 7);
    const auto k3 = complete_graph(3);
    out.push_back(check_sim_vs_oracle("K3", k3, random_intensity(3, rng, -1.0, 1.0), 2e5, seed, 4.5));
  }
  out.push_back(check_bum_interior(star, unit, 1000));
  return out;
}

}  // namespace bethe_csma
