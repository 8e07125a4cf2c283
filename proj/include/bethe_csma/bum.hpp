#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bas.hpp"
#include "bethe.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "link_vector.hpp"
#include "utility.hpp"

namespace bethe_csma {

// Rates below this make U and its derivative blow up for alpha >= 1.
inline constexpr double kUtilityFloor = 1e-300;

/// Time-varying bounds of the BUM projection: iterates are kept at or above
/// c1(t) and at least about c2(t) away from every edge constraint.
struct ProjectionSchedule {
  std::function<double(double)> c1;
  std::function<double(double)> c2;
  /// Identifies the schedule for result caching; empty disables caching.
  std::string key;
};

/// c1(t) = 1 / (a log(t + e)), c2(t) = 1 / (b t^gamma). Defaults a = 100,
/// b = 5, gamma = 1/4.
inline ProjectionSchedule default_projection_schedule(double c1_scale = 100.0, double c2_scale = 5.0,
                                                      double c2_exponent = 0.25) {
  if (!(c1_scale > 0.0) || !(c2_scale > 0.0) || !(c2_exponent > 0.0))
    throw PreconditionError("projection schedule scales and exponent must be > 0");
  std::ostringstream key;
  key.precision(17);
  key << "log-power(" << c1_scale << "," << c2_scale << "," << c2_exponent << ")";
  return {[c1_scale](double t) { return 1.0 / (c1_scale * std::log(t + std::numbers::e)); },
          [c2_scale, c2_exponent](double t) { return 1.0 / (c2_scale * std::pow(t, c2_exponent)); }, key.str()};
}

/// (1/sqrt t) (c1^-alpha - log(c1 c2)) / min(c1, c2); must vanish as t grows
/// for the convergence guarantee to apply.
inline double rate_condition_value(const ProjectionSchedule& sched, const UtilitySpec& u, double t) {
  const double c1 = sched.c1(t), c2 = sched.c2(t);
  return (std::pow(c1, -u.alpha) - std::log(c1 * c2)) / (std::sqrt(t) * std::min(c1, c2));
}

// ---------------------------------------------------------------------------
// Objective

inline void check_utility_domain(const RateVector& y) {
  for (std::size_t i = 0; i < y.size(); ++i)
    if (y[i] < kUtilityFloor)
      throw DomainError("y[" + std::to_string(i) + "] = " + detail::fmt(y[i]) + " is below the utility floor " +
                        detail::fmt(kUtilityFloor));
}

/// K_B(y) = beta sum_i U(y_i) + H_B(y). Requires y strictly inside D_B.
inline double k_b(const InterferenceGraph& g, const RateVector& y, const UtilitySpec& u) {
  detail::check_domain(g, y, true, "y");
  check_utility_domain(y);
  double utility = 0.0;
  for (double v : y) utility += u.value(v);
  return u.beta * utility + bethe_entropy(g, y);
}

/// dK_B/dy_i; reads only y_i and the neighbours' values.
inline double grad_k_b_link(const InterferenceGraph& g, const RateVector& y, const UtilitySpec& u, std::size_t i) {
  double gi = u.beta * u.derivative(y[i]) - (static_cast<double>(g.degree(i)) - 1.0) * std::log(1.0 - y[i]) -
              std::log(y[i]);
  for (auto j : g.neighbors(i)) gi += std::log(1.0 - y[i] - y[j]);
  return gi;
}

inline std::vector<double> grad_k_b(const InterferenceGraph& g, const RateVector& y, const UtilitySpec& u) {
  detail::check_domain(g, y, true, "y");
  check_utility_domain(y);
  std::vector<double> grad(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) grad[i] = grad_k_b_link(g, y, u, i);
  return grad;
}

// ---------------------------------------------------------------------------
// Projection

struct ProjectionResult {
  double value = 0.0;
  bool lower = false;     // clamped up to c1
  bool upper = false;     // clamped down to 1 - kappa
  bool conflict = false;  // c1 > 1 - kappa; the lower clamp wins
};

/// [x]_* with kappa = (1 - y_i + max_{j in N(i)} y_j + c2) / 2, i.e. a clamp
/// to [c1, (1 + y_i - neighbor_max - c2)/2]. An isolated link uses
/// neighbor_max = 0.
inline ProjectionResult project_star_detailed(double x, double y_i, double neighbor_max, double c1, double c2) {
  const double kappa = (1.0 - y_i + neighbor_max + c2) / 2.0;
  const double upper = 1.0 - kappa;
  if (c1 > upper) return {c1, true, false, true};
  if (x < c1) return {c1, true, false, false};
  if (x > upper) return {upper, false, true, false};
  return {x, false, false, false};
}

inline double project_star(double x, double y_i, double neighbor_max, double c1, double c2) {
  return project_star_detailed(x, y_i, neighbor_max, c1, c2).value;
}

// ---------------------------------------------------------------------------
// Iteration

/// What happened during the update y(t) -> y(t+1).
struct BumUpdate {
  std::vector<std::uint8_t> hits;  // per link: a projection clamp fired
  bool conflict = false;
  double max_step = 0.0;           // max_i |dK_B/dy_i| / sqrt(t)
  double c1 = 0.0;
  double c2 = 0.0;
};

/// Synchronous BUM iteration starting from y(1) = 1/4. Every link reads the
/// time-t snapshot of its neighbours, both for the gradient and for kappa(t).
class BumIterator {
 public:
  BumIterator(const InterferenceGraph& g, const UtilitySpec& u, ProjectionSchedule sched)
      : g_(&g), u_(u), sched_(std::move(sched)), y_(g.size(), 0.25) {
    u_.validate();
  }

  std::size_t t() const noexcept { return t_; }
  const RateVector& y() const noexcept { return y_; }

  BumUpdate step() {
    const auto& g = *g_;
    const double t = static_cast<double>(t_);
    const double step = 1.0 / std::sqrt(t);
    BumUpdate info;
    info.c1 = sched_.c1(t);
    info.c2 = sched_.c2(t);
    info.hits.assign(g.size(), 0);
    RateVector next(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double gi = grad_k_b_link(g, y_, u_, i);
      info.max_step = std::max(info.max_step, step * std::abs(gi));
      double neighbor_max = 0.0;
      for (auto j : g.neighbors(i)) neighbor_max = std::max(neighbor_max, y_[j]);
      const auto p = project_star_detailed(y_[i] + step * gi, y_[i], neighbor_max, info.c1, info.c2);
      next[i] = p.value;
      info.hits[i] = (p.lower || p.upper) ? 1 : 0;
      info.conflict = info.conflict || p.conflict;
    }
    const auto point = bethe_domain_point(g, next);
    if (!point.interior() || !std::isfinite(point.margin)) {
      std::ostringstream os;
      os.precision(17);
      os << "BUM iterate left the Bethe domain interior at t=" << t_ + 1 << " (margin " << point.margin
         << "); y =";
      for (double v : next) os << ' ' << v;
      throw InvariantViolation(os.str());
    }
    y_ = std::move(next);
    ++t_;
    return info;
  }

 private:
  const InterferenceGraph* g_;
  UtilitySpec u_;
  ProjectionSchedule sched_;
  RateVector y_;
  std::size_t t_ = 1;
};

// ---------------------------------------------------------------------------
// Traces

struct BumRecord {
  std::size_t t = 0;
  RateVector y;
  IntensityVector r;
  double k_b = 0.0;
  // Projection outcome of the update y(t) -> y(t+1); empty on the last record.
  std::vector<std::uint8_t> hits;
  bool conflict = false;
  double max_step = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
};

struct BumTrace {
  std::vector<BumRecord> records;  // t = 1..T
  RateVector final_y;
  std::size_t best_t = 0;
  double best_k_b = -std::numeric_limits<double>::infinity();
  RateVector best_y;
  double mu_gap = 0.0;  // sum_t mu(t) (best_k_b - K_B(y(t)))
  double rate_condition_at_horizon = 0.0;
  double rate_condition_at_half = 0.0;
  std::vector<std::string> warnings;
};

/// mu(t) proportional to t^(-1/2) on {1..T}.
inline std::vector<double> mu_weights(std::size_t horizon) {
  std::vector<double> w(horizon);
  double total = 0.0;
  for (std::size_t t = 1; t <= horizon; ++t) total += (w[t - 1] = 1.0 / std::sqrt(static_cast<double>(t)));
  for (auto& v : w) v /= total;
  return w;
}

/// sum_t mu(t) (reference - K_B(y(t))) over the trace's horizon.
inline double mu_weighted_gap(const BumTrace& trace, double reference) {
  const auto w = mu_weights(trace.records.size());
  double gap = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) gap += w[k] * (reference - trace.records[k].k_b);
  return gap;
}

/// Runs T iterations of BUM. Record t holds y(t), the intensity r(t) from the
/// closed-form Bethe map, and K_B(y(t)); y(T) is the final iterate.
inline BumTrace bum_run(const InterferenceGraph& g, const UtilitySpec& u, const ProjectionSchedule& sched,
                        std::size_t horizon) {
  if (horizon < 1) throw PreconditionError("BUM horizon T must be >= 1");
  u.validate();
  BumTrace trace;
  if (!u.in_convergence_regime(g.max_degree())) {
    std::ostringstream os;
    os << "beta = " << u.beta << " is not above 2d/alpha = "
       << (u.alpha > 0 ? 2.0 * static_cast<double>(g.max_degree()) / u.alpha : std::numeric_limits<double>::infinity())
       << "; convergence and concavity are not guaranteed";
    trace.warnings.push_back(os.str());
  }
  BumIterator it(g, u, sched);
  trace.records.reserve(horizon);
  for (std::size_t t = 1; t <= horizon; ++t) {
    BumRecord rec;
    rec.t = t;
    rec.y = it.y();
    rec.r = bas_intensity(g, rec.y);
    rec.k_b = k_b(g, rec.y, u);
    if (rec.k_b > trace.best_k_b) {
      trace.best_k_b = rec.k_b;
      trace.best_t = t;
    }
    if (t < horizon) {
      auto info = it.step();
      rec.hits = std::move(info.hits);
      rec.conflict = info.conflict;
      rec.max_step = info.max_step;
      rec.c1 = info.c1;
      rec.c2 = info.c2;
    } else {
      rec.c1 = sched.c1(static_cast<double>(t));
      rec.c2 = sched.c2(static_cast<double>(t));
    }
    trace.records.push_back(std::move(rec));
  }
  trace.final_y = trace.records.back().y;
  trace.best_y = trace.records[trace.best_t - 1].y;
  trace.mu_gap = mu_weighted_gap(trace, trace.best_k_b);
  trace.rate_condition_at_horizon = rate_condition_value(sched, u, static_cast<double>(horizon));
  trace.rate_condition_at_half =
      rate_condition_value(sched, u, std::max(1.0, std::floor(static_cast<double>(horizon) / 2.0)));
  return trace;
}

/// Deployable CSMA intensities for the BUM output: the Bethe map applied to y.
inline IntensityVector bum_recover_intensity(const InterferenceGraph& g, const RateVector& y_final) {
  return bas_intensity(g, y_final);
}

struct ReferenceOptimum {
  RateVector y;
  double k_b = -std::numeric_limits<double>::infinity();
  std::size_t horizon = 0;
};

/// Best K_B seen along a long BUM run, used as the stand-in for max K_B.
/// Results are memoised per (graph, utility, schedule key, horizon).
inline ReferenceOptimum reference_optimum(const InterferenceGraph& g, const UtilitySpec& u,
                                          const ProjectionSchedule& sched, std::size_t horizon = 1'000'000) {
  static std::mutex mutex;
  static std::map<std::string, ReferenceOptimum> cache;
  std::string key;
  if (!sched.key.empty()) {
    std::ostringstream os;
    os.precision(17);
    os << g.size() << ';';
    for (const auto& [a, b] : g.edges()) os << a << '-' << b << ',';
    os << ';' << u.alpha << ';' << u.beta << ';' << sched.key << ';' << horizon;
    key = os.str();
    std::lock_guard lock(mutex);
    if (auto found = cache.find(key); found != cache.end()) return found->second;
  }
  BumIterator it(g, u, sched);
  ReferenceOptimum best;
  best.horizon = horizon;
  for (std::size_t t = 1; t <= horizon; ++t) {
    const double value = k_b(g, it.y(), u);
    if (value > best.k_b) {
      best.k_b = value;
      best.y = it.y();
    }
    if (t < horizon) it.step();
  }
  if (!key.empty()) {
    std::lock_guard lock(mutex);
    cache.emplace(key, best);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Domain-invariance diagnostics

/// Empirical stand-ins for the quantities that govern when the projection
/// stops mattering: the time after which no clamp fires and every step is
/// below half the projection width, and the smallest distances to the
/// domain boundary actually observed.
struct DomainDiagnostics {
  bool all_interior = true;
  std::size_t clamp_events = 0;
  std::size_t conflict_events = 0;
  std::size_t last_clamp_t = 0;          // 0 if the projection never fired
  std::optional<std::size_t> step_settled_t;  // first tau with small steps for all t >= tau
  std::optional<std::size_t> t_star;     // max of (last_clamp_t + 1) and step_settled_t
  // Minimum observed margins over the whole trace.
  double min_y = std::numeric_limits<double>::infinity();
  double min_one_minus_y = std::numeric_limits<double>::infinity();
  double min_edge_slack = std::numeric_limits<double>::infinity();
  // Same minima restricted to t >= t_star.
  double min_y_after = std::numeric_limits<double>::infinity();
  double min_one_minus_y_after = std::numeric_limits<double>::infinity();
  double min_edge_slack_after = std::numeric_limits<double>::infinity();
  // Closed-form lower margins evaluated at the surrogate t_star.
  double delta1 = 0.0;
  double delta2 = 0.0;
  double delta3 = 0.0;
  bool within_formula_domain = false;
  // Rate condition (should shrink with t) at T/2 and T.
  double rate_condition_half = 0.0;
  double rate_condition_end = 0.0;
};

inline DomainDiagnostics domain_diagnostics(const BumTrace& trace, const InterferenceGraph& g, const UtilitySpec& u,
                                       const ProjectionSchedule& sched) {
  DomainDiagnostics rep;
  const std::size_t horizon = trace.records.size();
  rep.rate_condition_half = trace.rate_condition_at_half;
  rep.rate_condition_end = trace.rate_condition_at_horizon;

  std::optional<std::size_t> settled;
  for (const auto& rec : trace.records) {
    if (!bethe_domain_point(g, rec.y).interior()) rep.all_interior = false;
    if (rec.conflict) ++rep.conflict_events;
    if (std::any_of(rec.hits.begin(), rec.hits.end(), [](auto h) { return h != 0; })) {
      ++rep.clamp_events;
      rep.last_clamp_t = rec.t;
    }
    if (rec.hits.empty()) continue;  // last record has no update
    const bool small = rec.max_step < 0.5 * std::min(rec.c1, rec.c2);
    if (!small) settled.reset();
    else if (!settled) settled = rec.t;
  }
  if (horizon <= 1) settled = 1;
  rep.step_settled_t = settled;
  if (settled) rep.t_star = std::max(rep.last_clamp_t + 1, *settled);

  for (const auto& rec : trace.records) {
    const bool after = rep.t_star && rec.t >= *rep.t_star;
    for (std::size_t i = 0; i < rec.y.size(); ++i) {
      rep.min_y = std::min(rep.min_y, rec.y[i]);
      rep.min_one_minus_y = std::min(rep.min_one_minus_y, 1.0 - rec.y[i]);
      if (after) {
        rep.min_y_after = std::min(rep.min_y_after, rec.y[i]);
        rep.min_one_minus_y_after = std::min(rep.min_one_minus_y_after, 1.0 - rec.y[i]);
      }
    }
    for (const auto& [a, b] : g.edges()) {
      const double s = 1.0 - rec.y[a] - rec.y[b];
      rep.min_edge_slack = std::min(rep.min_edge_slack, s);
      if (after) rep.min_edge_slack_after = std::min(rep.min_edge_slack_after, s);
    }
  }

  const double ts = static_cast<double>(rep.t_star.value_or(horizon));
  const double d = static_cast<double>(g.max_degree());
  const double b2a = u.beta * std::pow(2.0, u.alpha);
  rep.delta2 = std::min(sched.c2(ts), 1.0 / (2.0 * (std::exp(b2a) + 1.0)));
  rep.delta1 = std::min(sched.c1(ts), b2a * std::pow(rep.delta2, d) /
                                          (4.0 * (1.0 + b2a * d * std::pow(rep.delta2, d - 1.0))));
  rep.delta3 = std::min(sched.c2(ts), rep.delta1 / (2.0 * std::exp(u.beta * std::pow(rep.delta1, -u.alpha))));
  rep.within_formula_domain =
      rep.min_y >= rep.delta1 && rep.min_one_minus_y >= rep.delta2 && rep.min_edge_slack >= rep.delta3;
  return rep;
}

}  // namespace bethe_csma
