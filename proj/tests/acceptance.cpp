// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bethe_csma/bethe_csma.hpp"

using namespace bethe_csma;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double budget_seconds;
  std::function<Outcome()> run;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double log_utility(const RateVector& s) {
  double u = 0.0;
  for (double v : s) u += std::log(v);
  return u;
}

Outcome bas_zero_gradient() {
  const auto r = check_bas_zero_gradient(2024, 50);
  return {r.passed, fmt("max |grad F_B| = %.3e (tol %.0e)", r.measured, r.tolerance)};
}

Outcome tree_exactness() {
  const auto r = check_tree_exactness(2024);
  return {r.passed, fmt("max |s - lambda| = %.3e (tol %.0e)", r.measured, r.tolerance)};
}

Outcome bethe_error_sweep_check() {
  const std::vector<double> loads{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  struct Case {
    std::string label;
    InterferenceGraph g;
    bool monotone;
  };
  const std::vector<Case> cases{{"K5", complete_graph(5), true},
                                {"ring8", ring_graph(8), true},
                                {"random10", random_graph(10, 0.3, 1), false}};
  bool ok = true;
  std::string detail;
  for (const auto& c : cases) {
    const auto rows = bethe_error_sweep(c.g, loads, kDefaultEnumerationCap, 0);
    double worst = 0.0, prev = 0.0, worst_drop = 0.0;
    for (const auto& row : rows) {
      worst = std::max(worst, row.max_normalized);
      worst_drop = std::max(worst_drop, prev - row.max_normalized);
      prev = row.max_normalized;
    }
    const bool case_ok = worst <= 0.2 && (!c.monotone || worst_drop <= 1e-6);
    ok = ok && case_ok;
    detail += fmt("%s %s max=%.4f drop=%.1e; ", c.label.c_str(), case_ok ? "ok" : "FAILS", worst, worst_drop);
  }
  const double k3 = bethe_error_at(complete_graph(3), RateVector(3, 0.2)).max_normalized;
  ok = ok && std::abs(k3 - 1.0 / 21.0) <= 1e-6;
  detail += fmt("K3@0.2=%.7f (1/21=%.7f)", k3, 1.0 / 21.0);
  return {ok, detail};
}

Outcome gibbs_variational() {
  bool ok = true;
  std::string detail;
  std::mt19937_64 rng(2024);
  for (const auto& [label, g] : std::vector<std::pair<std::string, InterferenceGraph>>{{"K3", complete_graph(3)},
                                                                                      {"path4", path_graph(4)}}) {
    const auto rep = verify_gibbs_variational(g, random_intensity(g.size(), rng), 1000, rng());
    ok = ok && rep.passed();
    detail += fmt("%s violations=%zu min_excess=%.3e |F+logZ|=%.1e; ", label.c_str(), rep.violations, rep.min_excess,
                  rep.identity_error);
  }
  return {ok, detail};
}

Outcome hessian() {
  const auto rep = hessian_check_k_b(star_graph(5), UtilitySpec{1.0, 8.0}, 200, 2024);
  const bool ok = rep.asserted && rep.eigen_violations == 0 && rep.max_eigenvalue <= 1e-9 && rep.max_fd_error <= 1e-4;
  return {ok, fmt("max eigenvalue=%.4e, fd rel err=%.2e", rep.max_eigenvalue, rep.max_fd_error)};
}

Outcome bum_convergence() {
  const auto g = star_graph(5);
  const UtilitySpec u{1.0, 1.0};
  const auto sched = default_projection_schedule();
  const auto trace = bum_run(g, u, sched, 1000);
  const double utility = log_utility(service_rates(g, bum_recover_intensity(g, trace.final_y)));
  const double ref = reference_optimum(g, u, sched).k_b;
  std::vector<double> scaled;
  for (std::size_t T : {100u, 400u, 1600u}) {
    const double gap = mu_weighted_gap(bum_run(g, u, sched, T), ref);
    scaled.push_back(gap * std::sqrt(static_cast<double>(T)) / std::log(static_cast<double>(T)));
  }
  const bool ok = std::abs(utility + 3.3) <= 0.1 && scaled[2] <= 2.0 * scaled[0];
  return {ok, fmt("utility=%.4f; gap*sqrtT/logT: T=100 %.3f, T=400 %.3f, T=1600 %.3f", utility, scaled[0], scaled[1],
                  scaled[2])};
}

Outcome utility_table() {
  const UtilitySpec u{1.0, 1.0};
  const auto sched = default_projection_schedule();
  const auto k5 = complete_graph(5);
  const double k5_utility = log_utility(service_rates(k5, bum_recover_intensity(k5, bum_run(k5, u, sched, 1000).final_y)));
  const auto grid = grid_graph(5, 5);
  const auto r = bum_recover_intensity(grid, bum_run(grid, u, sched, 1000).final_y);
  const auto sim = simulate(grid, r, 1e6, 2024);
  const double grid_utility = log_utility(sim.rates);
  const bool ok = std::abs(k5_utility + 8.1) <= 0.15 && std::abs(grid_utility + 19.9) <= 0.5;
  return {ok, fmt("K5=%.4f (oracle), grid5x5=%.4f (simulation, 1e6 units)", k5_utility, grid_utility)};
}

Outcome simulator_fidelity() {
  bool ok = true;
  double worst_sigma = 0.0;
  std::mt19937_64 rng(2024);
  for (const auto& g : {complete_graph(3), ring_graph(6)}) {
    const auto r = random_intensity(g.size(), rng);
    const auto rows = parallel_map(5, [&](std::size_t k) { return estimate_vs_oracle(g, r, 1e6, 100 + k, 3.0); });
    for (const auto& rep : rows) {
      ok = ok && rep.all_within();
      for (std::size_t i = 0; i < g.size(); ++i)
        worst_sigma = std::max(worst_sigma, rep.deviation[i] / rep.standard_error[i]);
    }
  }
  const auto k3 = complete_graph(3);
  const auto sets = enumerate_feasible_schedules(k3);
  const auto r = random_intensity(3, rng);
  const auto pi = stationary_distribution(sets, r);
  SimOptions opt;
  opt.record_occupancy = true;
  const auto trace = simulate(k3, r, 1e6, 2024, opt);
  double worst_occ = 0.0;
  for (std::size_t k = 0; k < sets.size(); ++k) {
    const double f = trace.occupancy.count(sets[k]) ? trace.occupancy.at(sets[k]) : 0.0;
    const double z = std::abs(f - pi.probabilities[k]) / trace.occupancy_standard_error(sets[k]);
    worst_occ = std::max(worst_occ, z);
    ok = ok && z <= 3.0;
  }
  return {ok, fmt("worst link deviation %.2f sigma, worst occupancy deviation %.2f sigma", worst_sigma, worst_occ)};
}

Outcome baseline_contrast() {
  // On a tree the Bethe entropy is exact, so BUM and JW/EJW share the same
  // limit; its utility comes from the long-horizon BUM reference point.
  const auto g = star_graph(5);
  const UtilitySpec u{1.0, 1.0};
  const auto sched = default_projection_schedule();
  const auto ref = reference_optimum(g, u, sched);
  const double optimum = log_utility(service_rates(g, bum_recover_intensity(g, ref.y)));
  const double bum_gap =
      std::abs(optimum - log_utility(service_rates(g, bum_recover_intensity(g, bum_run(g, u, sched, 1000).final_y))));

  struct Job {
    ControllerKind kind;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (auto kind : {ControllerKind::jw, ControllerKind::ejw})
    for (std::uint64_t s = 1; s <= 5; ++s) jobs.push_back({kind, s});
  const auto gaps = parallel_map(jobs.size(), [&](std::size_t k) {
    BaselineConfig cfg;
    cfg.kind = jobs[k].kind;
    cfg.frames = 1000;
    const auto trace = run_baseline(g, u, cfg, jobs[k].seed);
    return std::abs(optimum - log_utility(service_rates(g, trace.final_r)));
  });
  int jw_wins = 0, ejw_wins = 0;
  std::string detail = fmt("optimum=%.4f bum_gap=%.2e;", optimum, bum_gap);
  for (std::size_t k = 0; k < jobs.size(); ++k) {
    const bool win = bum_gap < gaps[k];
    (jobs[k].kind == ControllerKind::jw ? jw_wins : ejw_wins) += win;
    detail += fmt(" %s%llu=%.2e", std::string(to_string(jobs[k].kind)).c_str(),
                  static_cast<unsigned long long>(jobs[k].seed), gaps[k]);
  }
  detail += fmt("; BUM better vs jw in %d/5, vs ejw in %d/5", jw_wins, ejw_wins);
  return {jw_wins >= 4 && ejw_wins >= 4, detail};
}

Outcome determinism() {
  ExperimentConfig cfg;
  cfg.baseline.frames = 100;
  cfg.sim_duration = 1e5;
  using Cmd = std::function<void(std::ostream&)>;
  const std::vector<std::pair<std::string, Cmd>> cmds{
      {"topo", [&](std::ostream& o) { cmd_topo(cfg, o); }},
      {"oracle", [&](std::ostream& o) { cmd_oracle(cfg, o); }},
      {"bas", [&](std::ostream& o) { cmd_bas(cfg, o); }},
      {"bethe-error",
       [&](std::ostream& o) {
         auto c = cfg;
         c.topology = {TopologyKind::complete, 5};
         cmd_bethe_error(c, o);
       }},
      {"bum", [&](std::ostream& o) { cmd_bum(cfg, o); }},
      {"baseline", [&](std::ostream& o) { cmd_baseline(cfg, o); }},
      {"compare", [&](std::ostream& o) { cmd_compare(cfg, o); }},
      {"verify", [&](std::ostream& o) { cmd_verify(cfg, o); }},
  };
  bool ok = true;
  std::string detail;
  for (const auto& [name, cmd] : cmds) {
    std::ostringstream a, b;
    cmd(a);
    cmd(b);
    const bool same = a.str() == b.str() && !a.str().empty();
    ok = ok && same;
    detail += name + (same ? "=same " : "=DIFFERENT ");
  }
  return {ok, detail};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "BAS makes lambda a zero-gradient point of F_B", 1.0, bas_zero_gradient},
      {2, "BAS is exact on trees", 1.0, tree_exactness},
      {3, "Bethe error sweep", 5.0, bethe_error_sweep_check},
      {4, "Gibbs variational principle", 2.0, gibbs_variational},
      {5, "K_B concavity at beta = 2d/alpha", 2.0, hessian},
      {6, "BUM convergence on star-5", 10.0, bum_convergence},
      {7, "BUM utility table", 300.0, utility_table},
      {8, "simulator fidelity", 60.0, simulator_fidelity},
      {9, "baseline slowness contrast", 300.0, baseline_contrast},
      {10, "determinism", 0.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = c.budget_seconds <= 0.0 || secs <= c.budget_seconds;
    const bool passed = out.passed && in_time;
    failures += !passed;
    std::printf("%s criterion %d (%s): %s [%.2fs%s]\n", passed ? "PASS" : "FAIL", c.id, c.name.c_str(),
                out.detail.c_str(), secs,
                in_time ? "" : fmt(" over %.0fs budget", c.budget_seconds).c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
