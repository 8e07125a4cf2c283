#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "bas.hpp"
#include "graph.hpp"
#include "link_vector.hpp"
#include "oracle.hpp"
#include "schedules.hpp"

namespace bethe_csma {

/// Gap between target rates and the exact service rates obtained under the
/// Bethe intensities for those targets.
struct BetheErrorReport {
  IntensityVector intensity;   // BAS(lambda)
  RateVector service;          // exact s(BAS(lambda))
  std::vector<double> error;   // |lambda_i - s_i|
  std::vector<double> normalized;  // error_i / lambda_i
  double max_error = 0.0;
  double max_normalized = 0.0;
};

/// Evaluates the Bethe error at lambda, which is by construction a
/// zero-gradient point of F_B(.; BAS(lambda)). Other stationary points of
/// F_B are not searched for.
inline BetheErrorReport bethe_error_at(const InterferenceGraph& g, const ScheduleSet& schedules,
                                       const RateVector& lambda) {
  BetheErrorReport rep;
  rep.intensity = bas_intensity(g, lambda);
  rep.service = service_rates(schedules, rep.intensity);
  rep.error.resize(lambda.size());
  rep.normalized.resize(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    rep.error[i] = std::abs(lambda[i] - rep.service[i]);
    rep.normalized[i] = rep.error[i] / lambda[i];
    rep.max_error = std::max(rep.max_error, rep.error[i]);
    rep.max_normalized = std::max(rep.max_normalized, rep.normalized[i]);
  }
  return rep;
}

inline BetheErrorReport bethe_error_at(const InterferenceGraph& g, const RateVector& lambda,
                                       std::size_t cap = kDefaultEnumerationCap) {
  return bethe_error_at(g, enumerate_feasible_schedules(g, cap), lambda);
}

}  // namespace bethe_csma
