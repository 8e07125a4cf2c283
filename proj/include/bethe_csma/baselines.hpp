#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "link_vector.hpp"
#include "sim.hpp"
#include "utility.hpp"

namespace bethe_csma {

/// Intensity controllers driven by empirical service rates.
///  fixed  r never changes.
///  jw     r_i += (1/t)(U'^{-1}(r_i/beta) - s_hat_i), frames of growing length.
///  ejw    same update, fixed frame length.
///  ssca   r_i = beta U'(running mean of s_hat_i).
enum class ControllerKind { fixed, jw, ejw, ssca };

inline std::string_view to_string(ControllerKind k) {
  switch (k) {
    case ControllerKind::fixed: return "fixed";
    case ControllerKind::jw: return "jw";
    case ControllerKind::ejw: return "ejw";
    case ControllerKind::ssca: return "ssca";
  }
  return "unknown";
}

inline ControllerKind parse_controller_kind(std::string_view name) {
  for (auto k : {ControllerKind::fixed, ControllerKind::jw, ControllerKind::ejw, ControllerKind::ssca})
    if (to_string(k) == name) return k;
  throw PreconditionError("unknown baseline '" + std::string(name) + "' (expected jw|ejw|ssca|fixed)");
}

struct BaselineConfig {
  ControllerKind kind = ControllerKind::jw;
  std::size_t frames = 1000;
  /// Base frame length L0 in clock units. JW uses L0 (1 + t) for frame t.
  double frame_length = 100.0;
  double r_init = 1.0;
  double r_min = -20.0;
  double r_max = 20.0;
  /// Floor applied to inputs of U' and U'^{-1}.
  double inversion_floor = 1e-6;

  void validate() const {
    if (frames < 1) throw PreconditionError("baseline frames must be >= 1");
    if (!(frame_length > 0.0)) throw PreconditionError("baseline frame_length must be > 0");
    if (!(r_min < r_max)) throw PreconditionError("baseline r_min must be < r_max");
    if (!(inversion_floor > 0.0)) throw PreconditionError("baseline inversion_floor must be > 0");
  }

  double frame_length_at(std::size_t t) const {
    return kind == ControllerKind::jw ? frame_length * (1.0 + static_cast<double>(t)) : frame_length;
  }
};

struct ControllerRecord {
  std::size_t update_index = 0;
  double sim_time = 0.0;  // clock at the end of the frame
  IntensityVector r;      // intensity after the update
  RateVector s_hat;       // empirical rates measured during the frame
  double utility_so_far = 0.0;  // sum_i U(cumulative busy_i / elapsed), floored
};

struct ControllerTrace {
  ControllerKind kind = ControllerKind::jw;
  std::vector<ControllerRecord> records;
  IntensityVector final_r;
  RateVector running_mean;  // (1/t) sum_j s_hat(j) after the last frame
};

/// Alternates simulation frames and intensity updates on one continuing
/// CSMA sample path.
inline ControllerTrace run_baseline(const InterferenceGraph& g, const UtilitySpec& u, const BaselineConfig& cfg,
                                    std::uint64_t seed) {
  cfg.validate();
  u.validate();
  if ((cfg.kind == ControllerKind::jw || cfg.kind == ControllerKind::ejw) && u.alpha == 0.0)
    throw PreconditionError("jw/ejw need alpha > 0 so that U' is invertible");
  const std::size_t n = g.size();
  IntensityVector r(n, std::clamp(cfg.r_init, cfg.r_min, cfg.r_max));
  CsmaSimulator sim(g, r, seed);
  ControllerTrace trace;
  trace.kind = cfg.kind;
  trace.records.reserve(cfg.frames);
  RateVector sum_s_hat(n, 0.0);
  std::vector<double> prev_busy(n, 0.0);

  for (std::size_t t = 1; t <= cfg.frames; ++t) {
    const double len = cfg.frame_length_at(t);
    sim.advance(len);
    ControllerRecord rec;
    rec.update_index = t;
    rec.sim_time = sim.clock();
    rec.s_hat = RateVector(n);
    for (std::size_t i = 0; i < n; ++i) {
      rec.s_hat[i] = (sim.busy_time()[i] - prev_busy[i]) / len;
      prev_busy[i] = sim.busy_time()[i];
      sum_s_hat[i] += rec.s_hat[i];
    }
    const double step = 1.0 / static_cast<double>(t);
    for (std::size_t i = 0; i < n; ++i) {
      switch (cfg.kind) {
        case ControllerKind::fixed: break;
        case ControllerKind::jw:
        case ControllerKind::ejw: {
          const double target = u.inverse_derivative(std::max(r[i], cfg.inversion_floor) / u.beta);
          r[i] += step * (target - rec.s_hat[i]);
          break;
        }
        case ControllerKind::ssca: {
          const double mean = sum_s_hat[i] / static_cast<double>(t);
          r[i] = u.beta * u.derivative(std::max(mean, cfg.inversion_floor));
          break;
        }
      }
      r[i] = std::clamp(r[i], cfg.r_min, cfg.r_max);
    }
    sim.set_intensity(r);
    rec.r = r;
    for (std::size_t i = 0; i < n; ++i)
      rec.utility_so_far += u.value(std::max(sim.busy_time()[i] / sim.clock(), cfg.inversion_floor));
    trace.records.push_back(std::move(rec));
  }
  trace.final_r = r;
  trace.running_mean = RateVector(n);
  for (std::size_t i = 0; i < n; ++i) trace.running_mean[i] = sum_s_hat[i] / static_cast<double>(cfg.frames);
  return trace;
}

}  // namespace bethe_csma
