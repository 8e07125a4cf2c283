#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "link_vector.hpp"
#include "oracle.hpp"
#include "schedules.hpp"

namespace bethe_csma {

struct SimOptions {
  /// Check sigma in I(G) after every event.
  bool check_feasibility = false;
  /// Accumulate time spent in each schedule (only for n <= 64).
  bool record_occupancy = false;
  /// Equal-length batches for the batch-means error estimate.
  std::size_t batches = 50;
};

/// Continuous-time CSMA (Glauber dynamics with unit-rate Poisson clocks),
/// simulated event by event. Clock ticks arrive at total rate n and pick a
/// uniform link; a ticking link backs off if a neighbour is active and
/// otherwise activates with probability exp(r_i) / (exp(r_i) + 1).
///
/// Busy time is accumulated lazily on state changes and at flush points, so
/// splitting a run into pieces does not change the random stream.
class CsmaSimulator {
 public:
  CsmaSimulator(const InterferenceGraph& g, const IntensityVector& r, std::uint64_t seed, SimOptions options = {})
      : g_(&g),
        options_(options),
        rng_(seed),
        pick_(0, g.size() == 0 ? 0 : g.size() - 1),
        wait_(static_cast<double>(g.size())),
        sigma_(g.size(), 0),
        blocking_(g.size(), 0),
        since_(g.size(), 0.0),
        busy_(g.size(), 0.0),
        accept_(g.size(), 0.0) {
    if (g.size() == 0) throw PreconditionError("cannot simulate an empty interference graph");
    if (options_.record_occupancy && g.size() > 64)
      throw PreconditionError("schedule occupancy needs n <= 64");
    set_intensity(r);
    next_event_ = wait_(rng_);
  }

  void set_intensity(const IntensityVector& r) {
    if (r.size() != g_->size())
      throw PreconditionError("intensity vector has " + std::to_string(r.size()) + " entries, graph has " +
                              std::to_string(g_->size()) + " links");
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (!std::isfinite(r[i])) throw PreconditionError("intensity r[" + std::to_string(i) + "] is not finite");
      accept_[i] = 1.0 / (1.0 + std::exp(-r[i]));
    }
  }

  double clock() const noexcept { return clock_; }
  std::uint64_t events() const noexcept { return events_; }
  const std::vector<std::uint8_t>& schedule() const noexcept { return sigma_; }
  std::uint64_t schedule_mask() const noexcept { return mask_; }

  /// Advances the process by `duration` clock units.
  void advance(double duration) {
    const double end = clock_ + duration;
    const auto& g = *g_;
    while (next_event_ <= end) {
      clock_ = next_event_;
      const std::size_t i = pick_(rng_);
      const bool want = blocking_[i] == 0 && coin_(rng_) < accept_[i];
      if (want != static_cast<bool>(sigma_[i])) toggle(i);
      ++events_;
      if (options_.check_feasibility && g.size() <= 64 && !is_feasible_schedule(g, mask_)) {
        std::ostringstream os;
        os << "infeasible schedule after event " << events_ << " at t=" << clock_;
        throw InvariantViolation(os.str());
      }
      next_event_ = clock_ + wait_(rng_);
    }
    clock_ = end;
    flush();
  }

  /// Accumulated active time per link since construction.
  const std::vector<double>& busy_time() const noexcept { return busy_; }
  const std::map<std::uint64_t, double>& occupancy() const noexcept { return occupancy_; }

 private:
  void toggle(std::size_t i) {
    if (options_.record_occupancy) {
      occupancy_[mask_] += clock_ - mask_since_;
      mask_since_ = clock_;
    }
    if (sigma_[i]) {
      busy_[i] += clock_ - since_[i];
      sigma_[i] = 0;
      for (auto j : g_->neighbors(i)) --blocking_[j];
    } else {
      since_[i] = clock_;
      sigma_[i] = 1;
      for (auto j : g_->neighbors(i)) ++blocking_[j];
    }
    if (g_->size() <= 64) mask_ ^= std::uint64_t{1} << i;
  }

  void flush() {
    for (std::size_t i = 0; i < sigma_.size(); ++i) {
      if (sigma_[i]) {
        busy_[i] += clock_ - since_[i];
        since_[i] = clock_;
      }
    }
    if (options_.record_occupancy) {
      occupancy_[mask_] += clock_ - mask_since_;
      mask_since_ = clock_;
    }
  }

  const InterferenceGraph* g_;
  SimOptions options_;
  std::mt19937_64 rng_;
  std::uniform_int_distribution<std::size_t> pick_;
  std::exponential_distribution<double> wait_;
  std::uniform_real_distribution<double> coin_{0.0, 1.0};
  std::vector<std::uint8_t> sigma_;
  std::vector<std::uint32_t> blocking_;  // active neighbours per link
  std::vector<double> since_;
  std::vector<double> busy_;
  std::vector<double> accept_;
  std::map<std::uint64_t, double> occupancy_;
  std::uint64_t mask_ = 0;
  double mask_since_ = 0.0;
  double clock_ = 0.0;
  double next_event_ = 0.0;
  std::uint64_t events_ = 0;
};

/// Result of one simulation run from the all-idle schedule.
struct SimTrace {
  double duration = 0.0;
  std::uint64_t events = 0;
  RateVector rates;                               // busy_time / duration
  std::vector<std::vector<double>> batch_rates;   // [batch][link]
  std::map<std::uint64_t, double> occupancy;      // fraction of time per schedule
  std::vector<std::map<std::uint64_t, double>> batch_occupancy;

  /// Batch-means standard error of each link's empirical rate.
  std::vector<double> standard_errors() const {
    const std::size_t b = batch_rates.size();
    std::vector<double> se(rates.size(), 0.0);
    if (b < 2) return se;
    for (std::size_t i = 0; i < rates.size(); ++i) {
      double mean = 0.0, ss = 0.0;
      for (const auto& row : batch_rates) mean += row[i];
      mean /= static_cast<double>(b);
      for (const auto& row : batch_rates) ss += (row[i] - mean) * (row[i] - mean);
      se[i] = std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
    }
    return se;
  }

  /// Batch-means standard error of the occupancy fraction of one schedule.
  double occupancy_standard_error(std::uint64_t mask) const {
    const std::size_t b = batch_occupancy.size();
    if (b < 2) return 0.0;
    std::vector<double> v(b, 0.0);
    for (std::size_t k = 0; k < b; ++k)
      if (auto it = batch_occupancy[k].find(mask); it != batch_occupancy[k].end()) v[k] = it->second;
    double mean = 0.0, ss = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(b);
    for (double x : v) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(b - 1) / static_cast<double>(b));
  }
};

inline SimTrace simulate(const InterferenceGraph& g, const IntensityVector& r, double duration, std::uint64_t seed,
                         SimOptions options = {}) {
  if (!(duration > 0.0) || !std::isfinite(duration))
    throw PreconditionError("simulation duration must be > 0, got " + std::to_string(duration));
  const std::size_t batches = std::max<std::size_t>(options.batches, 1);
  CsmaSimulator sim(g, r, seed, options);
  SimTrace trace;
  trace.duration = duration;
  trace.batch_rates.reserve(batches);
  const double piece = duration / static_cast<double>(batches);
  std::vector<double> prev_busy(g.size(), 0.0);
  std::map<std::uint64_t, double> prev_occ;
  for (std::size_t k = 0; k < batches; ++k) {
    sim.advance(k + 1 == batches ? duration - sim.clock() : piece);
    const double span = k + 1 == batches ? duration - piece * static_cast<double>(k) : piece;
    std::vector<double> row(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      row[i] = (sim.busy_time()[i] - prev_busy[i]) / span;
      prev_busy[i] = sim.busy_time()[i];
    }
    trace.batch_rates.push_back(std::move(row));
    if (options.record_occupancy) {
      std::map<std::uint64_t, double> frac;
      for (const auto& [m, t] : sim.occupancy()) {
        const double delta = t - prev_occ[m];
        if (delta > 0.0) frac[m] = delta / span;
      }
      prev_occ = sim.occupancy();
      trace.batch_occupancy.push_back(std::move(frac));
    }
  }
  trace.events = sim.events();
  trace.rates = RateVector(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) trace.rates[i] = sim.busy_time()[i] / duration;
  for (const auto& [m, t] : sim.occupancy()) trace.occupancy[m] = t / duration;
  return trace;
}

/// Per-link comparison of simulated rates against the exact oracle.
struct EstimateReport {
  RateVector estimate;
  RateVector exact;
  std::vector<double> deviation;         // |s_hat - s|
  std::vector<double> standard_error;    // batch means
  std::vector<double> effective_samples; // s(1-s) / se^2
  std::vector<std::uint8_t> within_band;
  double sigmas = 3.0;
  double max_deviation = 0.0;

  bool all_within() const {
    return std::all_of(within_band.begin(), within_band.end(), [](auto b) { return b != 0; });
  }
};

inline EstimateReport estimate_vs_oracle(const InterferenceGraph& g, const IntensityVector& r, double duration,
                                         std::uint64_t seed, double sigmas = 3.0,
                                         std::size_t cap = kDefaultEnumerationCap) {
  if (!(duration > 0.0)) throw PreconditionError("simulation duration must be > 0, got " + std::to_string(duration));
  EstimateReport rep;
  rep.exact = service_rates(g, r, cap);
  const auto trace = simulate(g, r, duration, seed);
  rep.estimate = trace.rates;
  rep.standard_error = trace.standard_errors();
  rep.sigmas = sigmas;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double dev = std::abs(rep.estimate[i] - rep.exact[i]);
    const double se = rep.standard_error[i];
    rep.deviation.push_back(dev);
    rep.effective_samples.push_back(se > 0.0 ? rep.exact[i] * (1.0 - rep.exact[i]) / (se * se) : 0.0);
    rep.within_band.push_back(dev <= sigmas * se ? 1 : 0);
    rep.max_deviation = std::max(rep.max_deviation, dev);
  }
  return rep;
}

}  // namespace bethe_csma
