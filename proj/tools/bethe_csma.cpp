// bethe-csma: command-line front end for the Bethe CSMA library.
//
// Exit codes: 0 success, 1 invariant failure, 2 configuration error.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "bethe_csma/experiment.hpp"

namespace bc = bethe_csma;

namespace {

struct Overrides {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  std::string topology;
  std::size_t size = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  double p = -1.0;
  std::string edges;
  double alpha = -1.0;
  double beta = -1.0;
  std::size_t horizon = 0;
  std::vector<double> loads;
  std::vector<double> lambda;
  double load = -1.0;
  double epsilon = 0.0;
  std::vector<double> intensity;
  std::string kind;
  std::size_t frames = 0;
  double frame_length = -1.0;
  double sim_duration = -1.0;
  std::size_t cap = 0;
  std::size_t workers = 0;
};

void add_common(CLI::App* sub, Overrides& o) {
  sub->add_option("--topology", o.topology, "complete|ring|star|grid|random|path|tree");
  sub->add_option("--size,-n", o.size, "Number of links (grid: use --width/--height)");
  sub->add_option("--width", o.width, "Grid width");
  sub->add_option("--height", o.height, "Grid height");
  sub->add_option("--p", o.p, "Edge probability for random graphs");
  sub->add_option("--edges", o.edges, "Edge-list file ('n <count>' header, then 'i j' lines)");
  sub->add_option("--cap", o.cap, "Enumeration cap for the exact oracle (default 24)");
  sub->add_option("--workers", o.workers, "Worker threads for sweeps (0 = hardware)");
}

bc::ExperimentConfig resolve(CLI::App& app, const Overrides& o) {
  bc::ExperimentConfig cfg;
  if (!o.config.empty()) cfg = bc::load_config_file(o.config);
  auto given = [&](const char* name) {
    for (auto* sub : app.get_subcommands())
      if (auto* opt = sub->get_option_no_throw(name); opt && opt->count() > 0) return true;
    auto* opt = app.get_option_no_throw(name);
    return opt && opt->count() > 0;
  };
  if (given("--seed")) cfg.seed = o.seed;
  if (given("--out")) cfg.out = o.out;
  if (given("--topology")) {
    try {
      cfg.topology.kind = bc::parse_topology_kind(o.topology);
    } catch (const bc::PreconditionError& e) {
      throw bc::ConfigError(std::string("--topology: ") + e.what());
    }
    cfg.edge_file.clear();
  }
  if (given("--size")) cfg.topology.size = o.size;
  if (given("--width")) cfg.topology.width = o.width;
  if (given("--height")) cfg.topology.height = o.height;
  if (given("--p")) cfg.topology.edge_probability = o.p;
  if (given("--edges")) cfg.edge_file = o.edges;
  if (given("--alpha")) cfg.utility.alpha = o.alpha;
  if (given("--beta")) cfg.utility.beta = o.beta;
  if (given("--horizon")) cfg.horizon = o.horizon;
  if (given("--loads")) cfg.loads = o.loads;
  if (given("--lambda")) cfg.lambda = o.lambda;
  if (given("--load")) cfg.load = o.load;
  if (given("--epsilon")) cfg.epsilon = o.epsilon;
  if (given("--intensity")) cfg.intensity = o.intensity;
  if (given("--kind")) cfg.baselines = {o.kind};
  if (given("--frames")) cfg.baseline.frames = o.frames;
  if (given("--frame-length")) cfg.baseline.frame_length = o.frame_length;
  if (given("--sim-duration")) cfg.sim_duration = o.sim_duration;
  if (given("--cap")) cfg.cap = o.cap;
  if (given("--workers")) cfg.workers = o.workers;
  if (given("--seed")) cfg.topology.seed = cfg.seed;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bethe-approximation CSMA: BAS intensities, BUM utility maximization, exact oracle and simulator"};
  app.require_subcommand(1);
  Overrides o;
  app.add_option("--config", o.config, "JSON config file");
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--out", o.out, "Output file (compare: output directory)");
  app.fallthrough();

  auto* topo = app.add_subcommand("topo", "Write the interference graph as an edge list");
  auto* oracle = app.add_subcommand("oracle", "Exact service rates for given intensities");
  auto* bas = app.add_subcommand("bas", "Bethe intensities for target service rates");
  auto* berr = app.add_subcommand("bethe-error", "Bethe error sweep over symmetric loads");
  auto* bum = app.add_subcommand("bum", "Run BUM and write its trace");
  auto* base = app.add_subcommand("baseline", "Run one MCMC baseline controller and write its trace");
  auto* cmp = app.add_subcommand("compare", "Compare BUM against the baselines");
  auto* ver = app.add_subcommand("verify", "Run the invariant suite");

  for (auto* sub : {topo, oracle, bas, berr, bum, base, cmp, ver}) add_common(sub, o);
  oracle->add_option("--intensity", o.intensity, "Per-link intensities r")->delimiter(',');
  bas->add_option("--lambda", o.lambda, "Per-link target rates")->delimiter(',');
  bas->add_option("--load", o.load, "Symmetric load in (0,1) when --lambda is absent");
  bas->add_option("--epsilon", o.epsilon, "Margin added to every target rate");
  berr->add_option("--loads", o.loads, "Comma-separated loads in (0,1)")->delimiter(',');
  for (auto* sub : {bum, base, cmp}) {
    sub->add_option("--alpha", o.alpha, "Fairness exponent");
    sub->add_option("--beta", o.beta, "Utility weight");
  }
  for (auto* sub : {bum, cmp}) sub->add_option("--horizon", o.horizon, "BUM iterations T");
  base->add_option("--kind", o.kind, "jw|ejw|ssca|fixed");
  for (auto* sub : {base, cmp}) {
    sub->add_option("--frames", o.frames, "Baseline intensity updates");
    sub->add_option("--frame-length", o.frame_length, "Base frame length in clock units");
  }
  cmp->add_option("--sim-duration", o.sim_duration, "Simulation length for utility beyond the oracle cap");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    const auto cfg = resolve(app, o);
    std::ofstream file;
    std::ostream* out = &std::cout;
    if (!cfg.out.empty() && !cmp->parsed()) {
      file.open(cfg.out, std::ios::binary);
      if (!file) throw bc::ConfigError("cannot open output file '" + cfg.out + "'");
      out = &file;
    }
    if (topo->parsed()) bc::cmd_topo(cfg, *out);
    else if (oracle->parsed()) bc::cmd_oracle(cfg, *out);
    else if (bas->parsed()) bc::cmd_bas(cfg, *out);
    else if (berr->parsed()) bc::cmd_bethe_error(cfg, *out);
    else if (bum->parsed()) bc::cmd_bum(cfg, *out, &std::cerr);
    else if (base->parsed()) bc::cmd_baseline(cfg, *out);
    else if (cmp->parsed()) bc::cmd_compare(cfg, *out);
    else if (ver->parsed()) return bc::cmd_verify(cfg, *out) ? 0 : 1;
    return 0;
  } catch (const bc::InvariantViolation& e) {
    std::cerr << "invariant violation: " << e.what() << '\n';
    return 1;
  } catch (const bc::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
