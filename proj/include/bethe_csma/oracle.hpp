#pragma once

#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "link_vector.hpp"
#include "numeric.hpp"
#include "schedules.hpp"

namespace bethe_csma {

/// A probability distribution over a ScheduleSet (aligned by index).
/// For the CSMA stationary law, log_partition holds log Z.
struct ScheduleDistribution {
  std::vector<double> probabilities;
  double log_partition = 0.0;
};

inline void require_same_links(const ScheduleSet& schedules, std::size_t n, const char* what) {
  if (schedules.links() != n) {
    throw PreconditionError(std::string(what) + " has " + std::to_string(n) + " entries, schedule set has " +
                            std::to_string(schedules.links()) + " links");
  }
}

/// Energy r . sigma of one schedule.
inline double schedule_energy(std::uint64_t mask, const IntensityVector& r) {
  double e = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (ScheduleSet::active(mask, i)) e += r[i];
  return e;
}

/// pi_sigma proportional to exp(r . sigma) over I(G), normalised in log space.
inline ScheduleDistribution stationary_distribution(const ScheduleSet& schedules, const IntensityVector& r) {
  require_same_links(schedules, r.size(), "intensity vector");
  std::vector<double> energy(schedules.size());
  for (std::size_t k = 0; k < schedules.size(); ++k) energy[k] = schedule_energy(schedules[k], r);
  const double log_z = log_sum_exp(energy);
  ScheduleDistribution dist;
  dist.log_partition = log_z;
  dist.probabilities.resize(energy.size());
  for (std::size_t k = 0; k < energy.size(); ++k) dist.probabilities[k] = std::exp(energy[k] - log_z);
  return dist;
}

inline ScheduleDistribution stationary_distribution(const InterferenceGraph& g, const IntensityVector& r,
                                                    std::size_t cap = kDefaultEnumerationCap) {
  return stationary_distribution(enumerate_feasible_schedules(g, cap), r);
}

/// Marginals s_i = P(sigma_i = 1) of an arbitrary schedule distribution.
inline RateVector marginals(const ScheduleSet& schedules, const ScheduleDistribution& dist) {
  if (dist.probabilities.size() != schedules.size())
    throw PreconditionError("distribution size does not match schedule set");
  RateVector s(schedules.links());
  for (std::size_t k = 0; k < schedules.size(); ++k) {
    std::uint64_t m = schedules[k];
    while (m) {
      const int i = std::countr_zero(m);
      s[static_cast<std::size_t>(i)] += dist.probabilities[k];
      m &= m - 1;
    }
  }
  return s;
}

inline RateVector service_rates(const ScheduleSet& schedules, const IntensityVector& r) {
  return marginals(schedules, stationary_distribution(schedules, r));
}

inline RateVector service_rates(const InterferenceGraph& g, const IntensityVector& r,
                                std::size_t cap = kDefaultEnumerationCap) {
  return service_rates(enumerate_feasible_schedules(g, cap), r);
}

/// F_G(nu; r) = -E_nu[r . sigma] - H_G(nu), with 0 log 0 = 0.
inline double gibbs_free_energy(const ScheduleSet& schedules, const ScheduleDistribution& nu,
                                const IntensityVector& r) {
  require_same_links(schedules, r.size(), "intensity vector");
  if (nu.probabilities.size() != schedules.size())
    throw PreconditionError("distribution has " + std::to_string(nu.probabilities.size()) +
                            " entries, schedule set has " + std::to_string(schedules.size()));
  double f = 0.0;
  for (std::size_t k = 0; k < schedules.size(); ++k) {
    const double p = nu.probabilities[k];
    f += -p * schedule_energy(schedules[k], r) + xlogx(p);
  }
  return f;
}

struct GibbsVariationalReport {
  std::size_t trials = 0;
  std::size_t violations = 0;
  double min_excess = 0.0;       // min over trials of F_G(nu) - F_G(pi)
  double identity_error = 0.0;   // |F_G(pi) + log Z|
  double stationary_energy = 0.0;
  std::optional<std::vector<double>> first_violation;

  static constexpr double kExcessTolerance = 1e-12;
  static constexpr double kIdentityTolerance = 1e-10;

  bool passed() const { return violations == 0 && identity_error <= kIdentityTolerance; }
};

/// Samples `trials` distributions with i.i.d. Exp(1) weights on I(G) and
/// checks none of them has lower Gibbs free energy than the stationary law.
inline GibbsVariationalReport verify_gibbs_variational(const InterferenceGraph& g, const IntensityVector& r,
                                                       std::size_t trials, std::uint64_t seed,
                                                       std::size_t cap = kDefaultEnumerationCap) {
  const auto schedules = enumerate_feasible_schedules(g, cap);
  const auto pi = stationary_distribution(schedules, r);
  GibbsVariationalReport report;
  report.trials = trials;
  report.stationary_energy = gibbs_free_energy(schedules, pi, r);
  report.identity_error = std::abs(report.stationary_energy + pi.log_partition);
  report.min_excess = std::numeric_limits<double>::infinity();

  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> weight(1.0);
  ScheduleDistribution nu;
  nu.probabilities.resize(schedules.size());
  for (std::size_t t = 0; t < trials; ++t) {
    double total = 0.0;
    for (auto& p : nu.probabilities) total += (p = weight(rng));
    for (auto& p : nu.probabilities) p /= total;
    const double excess = gibbs_free_energy(schedules, nu, r) - report.stationary_energy;
    report.min_excess = std::min(report.min_excess, excess);
    if (excess < -GibbsVariationalReport::kExcessTolerance) {
      if (!report.first_violation) report.first_violation = nu.probabilities;
      ++report.violations;
    }
  }
  return report;
}

}  // namespace bethe_csma
