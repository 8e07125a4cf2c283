#pragma once

// Command implementations behind the bethe-csma CLI. Each command writes
// schema-stable CSV to a stream so it can be driven from tests as well.

#include <json.hpp>

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "bas.hpp"
#include "bethe_error.hpp"
#include "bum.hpp"
#include "csv.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "oracle.hpp"
#include "parallel.hpp"
#include "schedules.hpp"
#include "sim.hpp"
#include "utility.hpp"
#include "verify.hpp"

namespace bethe_csma {

/// Invalid or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public Error {
 public:
  using Error::Error;
};

struct ExperimentConfig {
  TopologySpec topology{TopologyKind::star, 5, 0, 0, 0.3, 1};
  std::string edge_file;  // overrides `topology` when set

  UtilitySpec utility{1.0, 1.0};

  // Projection schedule c1(t) = 1/(c1_scale log(t+e)), c2(t) = 1/(c2_scale t^c2_exponent).
  double c1_scale = 100.0;
  double c2_scale = 5.0;
  double c2_exponent = 0.25;
  std::size_t horizon = 1000;
  std::size_t reference_horizon = 1'000'000;

  std::vector<double> loads{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  std::vector<double> lambda;     // explicit target rates (bas); empty = symmetric load
  double load = 0.5;              // symmetric load for bas when lambda is empty
  double epsilon = 0.0;           // bas margin
  std::vector<double> intensity;  // oracle / sim; empty = all zeros

  std::vector<std::string> baselines{"jw", "ejw", "ssca"};
  BaselineConfig baseline{};
  double sim_duration = 1e6;

  std::size_t cap = kDefaultEnumerationCap;
  std::size_t workers = 0;
  std::uint64_t seed = 1;
  std::string out;

  ProjectionSchedule schedule() const { return default_projection_schedule(c1_scale, c2_scale, c2_exponent); }

  void validate() const {
    try {
      utility.validate();
      (void)schedule();
    } catch (const PreconditionError& e) {
      throw ConfigError(e.what());
    }
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (reference_horizon < 1) throw ConfigError("reference_horizon must be >= 1");
    for (double l : loads)
      if (!(l > 0.0 && l < 1.0)) throw ConfigError("every load must lie in (0,1), got " + csv::number(l));
    if (!(load > 0.0 && load < 1.0)) throw ConfigError("load must lie in (0,1), got " + csv::number(load));
    if (!(sim_duration > 0.0)) throw ConfigError("sim_duration must be > 0");
    if (cap > kMaxEnumerationCap) throw ConfigError("cap must be <= " + std::to_string(kMaxEnumerationCap));
    for (const auto& b : baselines) {
      try {
        (void)parse_controller_kind(b);
      } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
      }
    }
    try {
      baseline.validate();
    } catch (const PreconditionError& e) {
      throw ConfigError(e.what());
    }
  }
};

/// Reads a JSON config. Unknown keys are rejected so typos do not silently
/// fall back to defaults.
inline ExperimentConfig parse_config(const nlohmann::json& j, ExperimentConfig cfg = {}) {
  auto reject_unknown = [](const nlohmann::json& obj, std::set<std::string> allowed, const std::string& where) {
    if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
    for (const auto& [key, _] : obj.items())
      if (!allowed.count(key)) throw ConfigError("unknown config key '" + where + "." + key + "'");
  };
  try {
    reject_unknown(j, {"topology", "utility", "bum", "loads", "lambda", "load", "epsilon", "intensity", "baseline",
                       "sim_duration", "cap", "workers", "seed", "out"},
                   "config");
    if (j.contains("topology")) {
      const auto& t = j["topology"];
      reject_unknown(t, {"kind", "size", "width", "height", "p", "seed", "edge_file"}, "topology");
      if (t.contains("kind")) cfg.topology.kind = parse_topology_kind(t["kind"].get<std::string>());
      if (t.contains("size")) cfg.topology.size = t["size"].get<std::size_t>();
      if (t.contains("width")) cfg.topology.width = t["width"].get<std::size_t>();
      if (t.contains("height")) cfg.topology.height = t["height"].get<std::size_t>();
      if (t.contains("p")) cfg.topology.edge_probability = t["p"].get<double>();
      if (t.contains("seed")) cfg.topology.seed = t["seed"].get<std::uint64_t>();
      if (t.contains("edge_file")) cfg.edge_file = t["edge_file"].get<std::string>();
    }
    if (j.contains("utility")) {
      const auto& u = j["utility"];
      reject_unknown(u, {"alpha", "beta"}, "utility");
      if (u.contains("alpha")) cfg.utility.alpha = u["alpha"].get<double>();
      if (u.contains("beta")) cfg.utility.beta = u["beta"].get<double>();
    }
    if (j.contains("bum")) {
      const auto& b = j["bum"];
      reject_unknown(b, {"horizon", "reference_horizon", "c1_scale", "c2_scale", "c2_exponent"}, "bum");
      if (b.contains("horizon")) cfg.horizon = b["horizon"].get<std::size_t>();
      if (b.contains("reference_horizon")) cfg.reference_horizon = b["reference_horizon"].get<std::size_t>();
      if (b.contains("c1_scale")) cfg.c1_scale = b["c1_scale"].get<double>();
      if (b.contains("c2_scale")) cfg.c2_scale = b["c2_scale"].get<double>();
      if (b.contains("c2_exponent")) cfg.c2_exponent = b["c2_exponent"].get<double>();
    }
    if (j.contains("baseline")) {
      const auto& b = j["baseline"];
      reject_unknown(b, {"kinds", "frames", "frame_length", "r_init", "r_min", "r_max", "inversion_floor"},
                     "baseline");
      if (b.contains("kinds")) cfg.baselines = b["kinds"].get<std::vector<std::string>>();
      if (b.contains("frames")) cfg.baseline.frames = b["frames"].get<std::size_t>();
      if (b.contains("frame_length")) cfg.baseline.frame_length = b["frame_length"].get<double>();
      if (b.contains("r_init")) cfg.baseline.r_init = b["r_init"].get<double>();
      if (b.contains("r_min")) cfg.baseline.r_min = b["r_min"].get<double>();
      if (b.contains("r_max")) cfg.baseline.r_max = b["r_max"].get<double>();
      if (b.contains("inversion_floor")) cfg.baseline.inversion_floor = b["inversion_floor"].get<double>();
    }
    if (j.contains("loads")) cfg.loads = j["loads"].get<std::vector<double>>();
    if (j.contains("lambda")) cfg.lambda = j["lambda"].get<std::vector<double>>();
    if (j.contains("load")) cfg.load = j["load"].get<double>();
    if (j.contains("epsilon")) cfg.epsilon = j["epsilon"].get<double>();
    if (j.contains("intensity")) cfg.intensity = j["intensity"].get<std::vector<double>>();
    if (j.contains("sim_duration")) cfg.sim_duration = j["sim_duration"].get<double>();
    if (j.contains("cap")) cfg.cap = j["cap"].get<std::size_t>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<std::size_t>();
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  } catch (const PreconditionError& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

inline ExperimentConfig load_config_file(const std::string& path, ExperimentConfig cfg = {}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_config(j, std::move(cfg));
}

inline nlohmann::json to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["topology"] = {{"kind", std::string(to_string(cfg.topology.kind))},
                   {"size", cfg.topology.size},
                   {"width", cfg.topology.width},
                   {"height", cfg.topology.height},
                   {"p", cfg.topology.edge_probability},
                   {"seed", cfg.topology.seed}};
  if (!cfg.edge_file.empty()) j["topology"]["edge_file"] = cfg.edge_file;
  j["utility"] = {{"alpha", cfg.utility.alpha}, {"beta", cfg.utility.beta}};
  j["bum"] = {{"horizon", cfg.horizon},
              {"reference_horizon", cfg.reference_horizon},
              {"c1_scale", cfg.c1_scale},
              {"c2_scale", cfg.c2_scale},
              {"c2_exponent", cfg.c2_exponent}};
  j["baseline"] = {{"kinds", cfg.baselines},
                   {"frames", cfg.baseline.frames},
                   {"frame_length", cfg.baseline.frame_length},
                   {"jw_frame_growth", "frame_length * (1 + t)"},
                   {"r_init", cfg.baseline.r_init},
                   {"r_min", cfg.baseline.r_min},
                   {"r_max", cfg.baseline.r_max},
                   {"inversion_floor", cfg.baseline.inversion_floor}};
  j["loads"] = cfg.loads;
  j["sim_duration"] = cfg.sim_duration;
  j["cap"] = cfg.cap;
  j["seed"] = cfg.seed;
  return j;
}

inline InterferenceGraph build_graph(const ExperimentConfig& cfg) {
  try {
    if (!cfg.edge_file.empty()) {
      std::ifstream in(cfg.edge_file);
      if (!in) throw ConfigError("cannot open edge file '" + cfg.edge_file + "'");
      return read_edge_list(in);
    }
    return make_topology(cfg.topology);
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("topology: ") + e.what());
  }
}

inline std::string topology_label(const ExperimentConfig& cfg) {
  return cfg.edge_file.empty() ? std::string(to_string(cfg.topology.kind)) : std::string("file");
}

/// Distinct, reproducible seeds for sub-runs.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// ---------------------------------------------------------------------------

inline void cmd_topo(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  write_edge_list(out, build_graph(cfg));
}

inline IntensityVector config_intensity(const ExperimentConfig& cfg, std::size_t n) {
  if (cfg.intensity.empty()) return IntensityVector(n, 0.0);
  if (cfg.intensity.size() != n)
    throw ConfigError("intensity has " + std::to_string(cfg.intensity.size()) + " entries, graph has " +
                      std::to_string(n) + " links");
  return IntensityVector(cfg.intensity);
}

/// link,intensity,service_rate,log_partition
inline void cmd_oracle(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const auto g = build_graph(cfg);
  const auto r = config_intensity(cfg, g.size());
  const auto schedules = enumerate_feasible_schedules(g, cfg.cap);
  const auto dist = stationary_distribution(schedules, r);
  const auto s = marginals(schedules, dist);
  csv::Writer w(out);
  w.row({"link", "intensity", "service_rate", "log_partition"});
  for (std::size_t i = 0; i < g.size(); ++i)
    w.row({std::to_string(i), csv::number(r[i]), csv::number(s[i]), csv::number(dist.log_partition)});
}

inline RateVector config_lambda(const ExperimentConfig& cfg, const InterferenceGraph& g) {
  if (!cfg.lambda.empty()) {
    if (cfg.lambda.size() != g.size())
      throw ConfigError("lambda has " + std::to_string(cfg.lambda.size()) + " entries, graph has " +
                        std::to_string(g.size()) + " links");
    return RateVector(cfg.lambda);
  }
  return RateVector(g.size(), cfg.load * symmetric_capacity(g, cfg.cap));
}

/// link,degree,lambda,intensity
inline void cmd_bas(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const auto g = build_graph(cfg);
  const auto lambda = config_lambda(cfg, g);
  IntensityVector r;
  try {
    r = bas_with_margin(g, lambda, cfg.epsilon);
  } catch (const DomainError& e) {
    throw ConfigError(e.what());
  }
  csv::Writer w(out);
  w.row({"link", "degree", "lambda", "intensity"});
  for (std::size_t i = 0; i < g.size(); ++i)
    w.row({std::to_string(i), std::to_string(g.degree(i)), csv::number(lambda[i] + cfg.epsilon), csv::number(r[i])});
}

struct SweepRow {
  double load = 0.0;
  double lambda = 0.0;
  double max_error = 0.0;
  double max_normalized = 0.0;
};

/// Symmetric-load Bethe error sweep over cfg.loads.
inline std::vector<SweepRow> bethe_error_sweep(const InterferenceGraph& g, const std::vector<double>& loads,
                                               std::size_t cap, std::size_t workers) {
  const auto schedules = enumerate_feasible_schedules(g, cap);
  const double capacity = static_cast<double>(independence_number(schedules)) / static_cast<double>(g.size());
  return parallel_map(
      loads.size(),
      [&](std::size_t k) {
        const RateVector lambda(g.size(), loads[k] * capacity);
        try {
          const auto rep = bethe_error_at(g, schedules, lambda);
          return SweepRow{loads[k], lambda[0], rep.max_error, rep.max_normalized};
        } catch (const DomainError& e) {
          throw ConfigError("load " + csv::number(loads[k]) + " gives symmetric rate " + csv::number(lambda[0]) +
                            " outside the Bethe domain: " + e.what());
        }
      },
      workers);
}

/// topology,n,load,lambda,e_max,normalized_e_max
inline void cmd_bethe_error(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const auto g = build_graph(cfg);
  const auto rows = bethe_error_sweep(g, cfg.loads, cfg.cap, cfg.workers);
  csv::Writer w(out);
  w.row({"topology", "n", "load", "lambda", "e_max", "normalized_e_max"});
  for (const auto& r : rows)
    w.row({topology_label(cfg), std::to_string(g.size()), csv::number(r.load), csv::number(r.lambda),
           csv::number(r.max_error), csv::number(r.max_normalized)});
}

inline std::string hit_bits(const std::vector<std::uint8_t>& hits, std::size_t n) {
  std::string s(n, '0');
  for (std::size_t i = 0; i < hits.size(); ++i)
    if (hits[i]) s[i] = '1';
  return s;
}

/// t,K_B,y_0..y_{n-1},r_0..r_{n-1},projection_hits
/// projection_hits is a 0/1 string, character i for link i, describing the
/// update out of y(t); it is all zeros on the final row.
inline void write_bum_trace(std::ostream& out, const BumTrace& trace, std::size_t n) {
  csv::Writer w(out);
  std::vector<std::string> header{"t", "K_B"};
  csv::append_indexed(header, "y", n);
  csv::append_indexed(header, "r", n);
  header.push_back("projection_hits");
  w.row(header);
  for (const auto& rec : trace.records) {
    std::vector<std::string> row{std::to_string(rec.t), csv::number(rec.k_b)};
    for (double v : rec.y) row.push_back(csv::number(v));
    for (double v : rec.r) row.push_back(csv::number(v));
    row.push_back(hit_bits(rec.hits, n));
    w.row(row);
  }
}

inline BumTrace cmd_bum(const ExperimentConfig& cfg, std::ostream& out, std::ostream* warnings = nullptr) {
  cfg.validate();
  const auto g = build_graph(cfg);
  auto trace = bum_run(g, cfg.utility, cfg.schedule(), cfg.horizon);
  if (warnings)
    for (const auto& w : trace.warnings) *warnings << "warning: " << w << '\n';
  write_bum_trace(out, trace, g.size());
  return trace;
}

/// update_index,sim_time,r_0..,s_hat_0..,utility_so_far
inline void write_controller_trace(std::ostream& out, const ControllerTrace& trace, std::size_t n) {
  csv::Writer w(out);
  std::vector<std::string> header{"update_index", "sim_time"};
  csv::append_indexed(header, "r", n);
  csv::append_indexed(header, "s_hat", n);
  header.push_back("utility_so_far");
  w.row(header);
  for (const auto& rec : trace.records) {
    std::vector<std::string> row{std::to_string(rec.update_index), csv::number(rec.sim_time)};
    for (double v : rec.r) row.push_back(csv::number(v));
    for (double v : rec.s_hat) row.push_back(csv::number(v));
    row.push_back(csv::number(rec.utility_so_far));
    w.row(row);
  }
}

inline ControllerTrace cmd_baseline(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  if (cfg.baselines.empty()) throw ConfigError("baseline needs a controller kind");
  const auto g = build_graph(cfg);
  auto bc = cfg.baseline;
  bc.kind = parse_controller_kind(cfg.baselines.front());
  auto trace = run_baseline(g, cfg.utility, bc, cfg.seed);
  write_controller_trace(out, trace, g.size());
  return trace;
}

struct UtilityEvaluation {
  double value = 0.0;
  std::string method;  // "oracle" or "simulation"
  RateVector rates;
};

/// sum_i U(s_i(r)): exact when the graph is within the enumeration cap,
/// otherwise from one long simulation.
inline UtilityEvaluation evaluate_utility(const InterferenceGraph& g, const IntensityVector& r, const UtilitySpec& u,
                                          std::size_t cap, double sim_duration, std::uint64_t seed) {
  UtilityEvaluation ev;
  if (g.size() <= std::min(cap, kMaxEnumerationCap)) {
    ev.rates = service_rates(g, r, cap);
    ev.method = "oracle";
  } else {
    ev.rates = simulate(g, r, sim_duration, seed).rates;
    ev.method = "simulation";
  }
  for (double s : ev.rates) ev.value += u.value(std::max(s, kUtilityFloor));
  return ev;
}

struct CompareRow {
  std::string algorithm;
  std::size_t updates = 0;
  UtilityEvaluation utility;
};

/// Runs BUM and the configured baselines on one topology. With a non-empty
/// cfg.out (a directory) writes bum_trace.csv, <kind>_trace.csv,
/// summary.csv and manifest.json there; the summary also goes to `out`.
inline std::vector<CompareRow> cmd_compare(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const auto g = build_graph(cfg);
  const std::size_t n = g.size();
  std::filesystem::path dir;
  if (!cfg.out.empty()) {
    dir = cfg.out;
    std::filesystem::create_directories(dir);
  }

  // Job 0 is BUM, job k >= 1 is baseline k-1; each writes its own trace.
  const std::size_t jobs = 1 + cfg.baselines.size();
  auto rows = parallel_map(
      jobs,
      [&](std::size_t k) {
        CompareRow row;
        if (k == 0) {
          const auto trace = bum_run(g, cfg.utility, cfg.schedule(), cfg.horizon);
          const auto r = bum_recover_intensity(g, trace.final_y);
          row.algorithm = "bum";
          row.updates = cfg.horizon;
          row.utility = evaluate_utility(g, r, cfg.utility, cfg.cap, cfg.sim_duration, derive_seed(cfg.seed, 100));
          if (!dir.empty()) {
            std::ofstream f(dir / "bum_trace.csv");
            write_bum_trace(f, trace, n);
          }
        } else {
          auto bc = cfg.baseline;
          bc.kind = parse_controller_kind(cfg.baselines[k - 1]);
          const auto trace = run_baseline(g, cfg.utility, bc, derive_seed(cfg.seed, k));
          row.algorithm = std::string(to_string(bc.kind));
          row.updates = bc.frames;
          row.utility =
              evaluate_utility(g, trace.final_r, cfg.utility, cfg.cap, cfg.sim_duration, derive_seed(cfg.seed, 100 + k));
          if (!dir.empty()) {
            std::ofstream f(dir / (row.algorithm + "_trace.csv"));
            write_controller_trace(f, trace, n);
          }
        }
        return row;
      },
      cfg.workers);

  auto write_summary = [&](std::ostream& s) {
    csv::Writer w(s);
    w.row({"algorithm", "updates", "final_utility", "evaluation"});
    for (const auto& r : rows)
      w.row({r.algorithm, std::to_string(r.updates), csv::number(r.utility.value), r.utility.method});
  };
  write_summary(out);
  if (!dir.empty()) {
    std::ofstream f(dir / "summary.csv");
    write_summary(f);
    auto manifest = to_json(cfg);
    manifest["n"] = n;
    manifest["edges"] = g.edge_count();
    manifest["projection_schedule"] = cfg.schedule().key;
    manifest["bum_initial_y"] = 0.25;
    manifest["utility_evaluation"] = g.size() <= cfg.cap ? "oracle" : "simulation";
    std::ofstream m(dir / "manifest.json");
    m << manifest.dump(2) << '\n';
  }
  return rows;
}

/// check,status,measured,tolerance; returns true iff every check passed.
inline bool cmd_verify(const ExperimentConfig& cfg, std::ostream& out) {
  cfg.validate();
  const auto results = run_verify_suite(cfg.seed);
  csv::Writer w(out);
  w.row({"check", "status", "measured", "tolerance"});
  bool ok = true;
  for (const auto& r : results) {
    ok = ok && r.passed;
    w.row({r.name, r.passed ? "pass" : "fail", csv::number(r.measured), csv::number(r.tolerance)});
  }
  return ok;
}

}  // namespace bethe_csma
