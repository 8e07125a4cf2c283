#include <gtest/gtest.h>

#include <bit>
#include <cstdint>
#include <sstream>

#include "bethe_csma/graph.hpp"
#include "bethe_csma/schedules.hpp"

using namespace bethe_csma;

namespace {

// Independent-set count by checking every subset.
std::size_t brute_force_count(const InterferenceGraph& g) {
  std::size_t count = 0;
  for (std::uint64_t m = 0; m < (std::uint64_t{1} << g.size()); ++m) {
    bool ok = true;
    for (const auto& [a, b] : g.edges()) ok = ok && !(((m >> a) & 1) && ((m >> b) & 1));
    count += ok;
  }
  return count;
}

std::uint64_t fibonacci(std::size_t k) {
  std::uint64_t a = 0, b = 1;
  for (std::size_t i = 0; i < k; ++i) {
    auto c = a + b;
    a = b;
    b = c;
  }
  return a;
}

std::uint64_t lucas(std::size_t k) {
  std::uint64_t a = 2, b = 1;
  for (std::size_t i = 0; i < k; ++i) {
    auto c = a + b;
    a = b;
    b = c;
  }
  return a;
}

}  // namespace

TEST(Topology, CompleteGraph) {
  const auto g = make_topology({TopologyKind::complete, 5});
  EXPECT_EQ(g.edge_count(), 10u);
  EXPECT_EQ(g.max_degree(), 4u);
}

TEST(Topology, Ring) {
  const auto g = make_topology({TopologyKind::ring, 8});
  EXPECT_EQ(g.edge_count(), 8u);
  for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(g.degree(i), 2u);
}

TEST(Topology, Grid) {
  TopologySpec spec{TopologyKind::grid};
  spec.width = 5;
  spec.height = 5;
  const auto g = make_topology(spec);
  EXPECT_EQ(g.size(), 25u);
  EXPECT_EQ(g.edge_count(), 40u);
  EXPECT_EQ(g.max_degree(), 4u);
  EXPECT_TRUE(g.has_edge(0, 1));
  EXPECT_TRUE(g.has_edge(0, 5));
  EXPECT_FALSE(g.has_edge(4, 5));
}

TEST(Topology, StarHubIsAdjacentToAllLeaves) {
  const auto g = make_topology({TopologyKind::star, 5});
  EXPECT_EQ(g.degree(0), 4u);
  for (std::size_t i = 1; i < 5; ++i) {
    EXPECT_EQ(g.degree(i), 1u);
    EXPECT_TRUE(g.has_edge(0, i));
  }
  EXPECT_TRUE(is_tree(g));
}

TEST(Topology, RandomIsSeededAndMayBeDisconnected) {
  TopologySpec spec{TopologyKind::random, 12};
  spec.edge_probability = 0.3;
  spec.seed = 42;
  EXPECT_EQ(make_topology(spec), make_topology(spec));
  spec.edge_probability = 0.0;
  const auto empty = make_topology(spec);
  EXPECT_EQ(empty.size(), 12u);
  EXPECT_EQ(empty.edge_count(), 0u);
}

TEST(Topology, RejectsBadParameters) {
  EXPECT_THROW(make_topology({TopologyKind::complete, 0}), PreconditionError);
  TopologySpec grid{TopologyKind::grid};
  grid.width = 3;
  EXPECT_THROW(make_topology(grid), PreconditionError);
  TopologySpec rnd{TopologyKind::random, 4};
  rnd.edge_probability = 1.5;
  EXPECT_THROW(make_topology(rnd), PreconditionError);
  EXPECT_THROW(parse_topology_kind("hexagon"), PreconditionError);
}

TEST(Graph, NormalisesAndValidatesEdges) {
  InterferenceGraph g(3, {{1, 0}, {0, 1}, {2, 1}});
  EXPECT_EQ(g.edge_count(), 2u);
  EXPECT_EQ(g.edges()[0], (InterferenceGraph::Edge{0, 1}));
  EXPECT_THROW(InterferenceGraph(3, {{1, 1}}), PreconditionError);
  EXPECT_THROW(InterferenceGraph(3, {{0, 3}}), PreconditionError);
}

TEST(Graph, RandomTreesAreTrees) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) EXPECT_TRUE(is_tree(random_tree(1 + seed % 10, seed)));
  EXPECT_FALSE(is_tree(ring_graph(5)));
}

TEST(EdgeList, RoundTrip) {
  const auto g = random_graph(9, 0.4, 7);
  std::stringstream ss;
  write_edge_list(ss, g);
  EXPECT_EQ(read_edge_list(ss), g);
}

TEST(EdgeList, Errors) {
  std::istringstream no_header("0 1\n");
  EXPECT_THROW(read_edge_list(no_header), PreconditionError);
  std::istringstream bad("n 3\n# comment\n0 1 2\n");
  EXPECT_THROW(read_edge_list(bad), PreconditionError);
  std::istringstream loop("n 3\n1 1\n");
  EXPECT_THROW(read_edge_list(loop), PreconditionError);
  std::istringstream ok("n 3\n\n# c\n0 2\n");
  EXPECT_EQ(read_edge_list(ok).edge_count(), 1u);
}

TEST(Schedules, Triangle) {
  const auto s = enumerate_feasible_schedules(complete_graph(3));
  EXPECT_EQ(s.masks(), (std::vector<std::uint64_t>{0b000, 0b001, 0b010, 0b100}));
  EXPECT_EQ(s.as_vector(1), (std::vector<int>{1, 0, 0}));
}

TEST(Schedules, NoEdges) {
  EXPECT_EQ(enumerate_feasible_schedules(InterferenceGraph(2, {})).size(), 4u);
}

TEST(Schedules, SingleEdge) {
  const auto s = enumerate_feasible_schedules(path_graph(2));
  EXPECT_EQ(s.masks(), (std::vector<std::uint64_t>{0b00, 0b01, 0b10}));
}

TEST(Schedules, CapIsEnforced) {
  EXPECT_THROW(enumerate_feasible_schedules(grid_graph(5, 5)), IntractableError);
  EXPECT_THROW(enumerate_feasible_schedules(ring_graph(10), 9), IntractableError);
}

TEST(Schedules, RaisedCapHandlesGrid5x5) {
  // Independent sets of the 5x5 grid graph (OEIS A006506).
  EXPECT_EQ(enumerate_feasible_schedules(grid_graph(5, 5), 25).size(), 55447u);
}

TEST(Schedules, EveryScheduleFeasibleAndCountMatchesBruteForce) {
  std::vector<InterferenceGraph> graphs{complete_graph(6), ring_graph(9), star_graph(7), grid_graph(3, 4),
                                        random_graph(11, 0.3, 5), random_graph(12, 0.5, 9), random_tree(10, 3)};
  for (const auto& g : graphs) {
    const auto s = enumerate_feasible_schedules(g);
    EXPECT_EQ(s.size(), brute_force_count(g));
    EXPECT_EQ(s[0], 0u);
    for (std::size_t k = 0; k < s.size(); ++k) {
      EXPECT_TRUE(is_feasible_schedule(g, s[k]));
      if (k > 0) {
        EXPECT_LT(s[k - 1], s[k]);
      }
    }
  }
}

TEST(Schedules, CycleCountsAreLucasPathCountsAreFibonacci) {
  for (std::size_t n = 3; n <= 12; ++n) EXPECT_EQ(enumerate_feasible_schedules(ring_graph(n)).size(), lucas(n)) << n;
  for (std::size_t n = 1; n <= 12; ++n)
    EXPECT_EQ(enumerate_feasible_schedules(path_graph(n)).size(), fibonacci(n + 2)) << n;
}

TEST(Capacity, Examples) {
  EXPECT_DOUBLE_EQ(symmetric_capacity(complete_graph(5)), 0.2);
  EXPECT_DOUBLE_EQ(symmetric_capacity(ring_graph(6)), 0.5);
  EXPECT_DOUBLE_EQ(symmetric_capacity(InterferenceGraph(1, {})), 1.0);
  EXPECT_THROW(symmetric_capacity(complete_graph(30)), IntractableError);
}

TEST(Capacity, TimeSharingMaximumSetsGivesSymmetricRate) {
  // For vertex-transitive graphs the uniform mixture of maximum independent
  // sets serves every link at exactly alpha(G)/n.
  for (const auto& g : {complete_graph(5), ring_graph(6), ring_graph(8), ring_graph(7)}) {
    const auto s = enumerate_feasible_schedules(g);
    const auto alpha = independence_number(s);
    std::vector<double> load(g.size(), 0.0);
    std::size_t count = 0;
    for (auto m : s.masks()) {
      if (static_cast<std::size_t>(std::popcount(m)) != alpha) continue;
      ++count;
      for (std::size_t i = 0; i < g.size(); ++i) load[i] += ScheduleSet::active(m, i);
    }
    for (double l : load) EXPECT_NEAR(l / static_cast<double>(count), symmetric_capacity(g), 1e-15);
  }
}
