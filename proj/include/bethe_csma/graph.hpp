#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace bethe_csma {

/// Undirected conflict graph over wireless links. Vertices are links; an edge
/// forbids simultaneous transmission. Immutable after construction.
class InterferenceGraph {
 public:
  using Edge = std::pair<std::size_t, std::size_t>;

  InterferenceGraph() = default;

  /// Edges may be given in either orientation and may repeat; they are
  /// normalised to (min, max) and deduplicated. Self-loops and out-of-range
  /// endpoints are rejected.
  InterferenceGraph(std::size_t n, std::vector<Edge> edges) : n_(n), adjacency_(n) {
    for (auto& [a, b] : edges) {
      if (a >= n || b >= n) {
        throw PreconditionError("edge (" + std::to_string(a) + "," + std::to_string(b) +
                                ") references a vertex outside [0," + std::to_string(n) + ")");
      }
      if (a == b) throw PreconditionError("self-loop on vertex " + std::to_string(a));
      if (a > b) std::swap(a, b);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    edges_ = std::move(edges);
    for (const auto& [a, b] : edges_) {
      adjacency_[a].push_back(b);
      adjacency_[b].push_back(a);
    }
    for (auto& nbrs : adjacency_) std::sort(nbrs.begin(), nbrs.end());
    for (const auto& nbrs : adjacency_) max_degree_ = std::max(max_degree_, nbrs.size());
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t edge_count() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const std::size_t> neighbors(std::size_t i) const noexcept { return adjacency_[i]; }
  std::size_t degree(std::size_t i) const noexcept { return adjacency_[i].size(); }
  std::size_t max_degree() const noexcept { return max_degree_; }

  bool has_edge(std::size_t i, std::size_t j) const {
    if (i > j) std::swap(i, j);
    return std::binary_search(edges_.begin(), edges_.end(), Edge{i, j});
  }

  /// Bit j set iff j is a neighbour of i. Only meaningful for n <= 64.
  std::uint64_t neighbor_mask(std::size_t i) const noexcept {
    std::uint64_t mask = 0;
    for (auto j : adjacency_[i]) mask |= std::uint64_t{1} << j;
    return mask;
  }

  friend bool operator==(const InterferenceGraph& a, const InterferenceGraph& b) {
    return a.n_ == b.n_ && a.edges_ == b.edges_;
  }

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::size_t max_degree_ = 0;
};

enum class TopologyKind { complete, ring, star, grid, random, path, tree };

inline std::string_view to_string(TopologyKind kind) {
  switch (kind) {
    case TopologyKind::complete: return "complete";
    case TopologyKind::ring: return "ring";
    case TopologyKind::star: return "star";
    case TopologyKind::grid: return "grid";
    case TopologyKind::random: return "random";
    case TopologyKind::path: return "path";
    case TopologyKind::tree: return "tree";
  }
  return "unknown";
}

inline TopologyKind parse_topology_kind(std::string_view name) {
  for (auto k : {TopologyKind::complete, TopologyKind::ring, TopologyKind::star, TopologyKind::grid,
                 TopologyKind::random, TopologyKind::path, TopologyKind::tree}) {
    if (to_string(k) == name) return k;
  }
  throw PreconditionError("unknown topology kind '" + std::string(name) +
                          "' (expected complete|ring|star|grid|random|path|tree)");
}

/// Parameters for make_topology. `size` is the vertex count for every kind
/// except grid, which uses width x height. A star of size n is one hub
/// (vertex 0) plus n-1 leaves.
struct TopologySpec {
  TopologyKind kind = TopologyKind::complete;
  std::size_t size = 0;
  std::size_t width = 0;
  std::size_t height = 0;
  double edge_probability = 0.5;
  std::uint64_t seed = 1;
};

inline InterferenceGraph complete_graph(std::size_t n) {
  std::vector<InterferenceGraph::Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(i, j);
  return {n, std::move(e)};
}

inline InterferenceGraph ring_graph(std::size_t n) {
  std::vector<InterferenceGraph::Edge> e;
  if (n >= 2)
    for (std::size_t i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return {n, std::move(e)};
}

inline InterferenceGraph path_graph(std::size_t n) {
  std::vector<InterferenceGraph::Edge> e;
  for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return {n, std::move(e)};
}

inline InterferenceGraph star_graph(std::size_t n) {
  std::vector<InterferenceGraph::Edge> e;
  for (std::size_t i = 1; i < n; ++i) e.emplace_back(0, i);
  return {n, std::move(e)};
}

/// w x h lattice, 4-neighbourhood, vertex (x, y) has index y*w + x.
inline InterferenceGraph grid_graph(std::size_t w, std::size_t h) {
  std::vector<InterferenceGraph::Edge> e;
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t v = y * w + x;
      if (x + 1 < w) e.emplace_back(v, v + 1);
      if (y + 1 < h) e.emplace_back(v, v + w);
    }
  }
  return {w * h, std::move(e)};
}

/// Erdos-Renyi G(n, p). Isolated vertices are kept.
inline InterferenceGraph random_graph(std::size_t n, double p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution coin(p);
  std::vector<InterferenceGraph::Edge> e;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (coin(rng)) e.emplace_back(i, j);
  return {n, std::move(e)};
}

/// Random recursive tree: vertex i > 0 attaches to a uniform earlier vertex.
inline InterferenceGraph random_tree(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<InterferenceGraph::Edge> e;
  for (std::size_t i = 1; i < n; ++i) {
    std::uniform_int_distribution<std::size_t> parent(0, i - 1);
    e.emplace_back(parent(rng), i);
  }
  return {n, std::move(e)};
}

inline InterferenceGraph make_topology(const TopologySpec& spec) {
  if (spec.kind == TopologyKind::grid) {
    if (spec.width == 0 || spec.height == 0)
      throw PreconditionError("grid topology needs width >= 1 and height >= 1");
    return grid_graph(spec.width, spec.height);
  }
  if (spec.size == 0)
    throw PreconditionError(std::string(to_string(spec.kind)) + " topology needs size >= 1");
  switch (spec.kind) {
    case TopologyKind::complete: return complete_graph(spec.size);
    case TopologyKind::ring: return ring_graph(spec.size);
    case TopologyKind::star: return star_graph(spec.size);
    case TopologyKind::path: return path_graph(spec.size);
    case TopologyKind::tree: return random_tree(spec.size, spec.seed);
    case TopologyKind::random:
      if (!(spec.edge_probability >= 0.0 && spec.edge_probability <= 1.0))
        throw PreconditionError("edge probability must lie in [0,1], got " +
                                std::to_string(spec.edge_probability));
      return random_graph(spec.size, spec.edge_probability, spec.seed);
    case TopologyKind::grid: break;
  }
  throw PreconditionError("unhandled topology kind");
}

/// Header line "n <count>", then one "i j" pair per line (0-indexed).
/// Blank lines and lines starting with '#' are ignored.
inline InterferenceGraph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  bool have_header = false;
  std::size_t n = 0;
  std::vector<InterferenceGraph::Edge> edges;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    if (!have_header) {
      std::string tag;
      if (!(ls >> tag >> n) || tag != "n")
        throw PreconditionError("edge list line " + std::to_string(line_no) + ": expected header 'n <count>'");
      have_header = true;
      continue;
    }
    long long a = -1, b = -1;
    std::string rest;
    if (!(ls >> a >> b) || (ls >> rest) || a < 0 || b < 0)
      throw PreconditionError("edge list line " + std::to_string(line_no) + ": expected two vertex indices 'i j'");
    edges.emplace_back(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
  }
  if (!have_header) throw PreconditionError("edge list is missing the 'n <count>' header");
  if (n == 0) throw PreconditionError("edge list declares zero vertices");
  return {n, std::move(edges)};
}

inline void write_edge_list(std::ostream& out, const InterferenceGraph& g) {
  out << "n " << g.size() << '\n';
  for (const auto& [a, b] : g.edges()) out << a << ' ' << b << '\n';
}

/// True iff g is connected and acyclic.
inline bool is_tree(const InterferenceGraph& g) {
  if (g.size() == 0 || g.edge_count() + 1 != g.size()) return false;
  std::vector<bool> seen(g.size(), false);
  std::vector<std::size_t> stack{0};
  seen[0] = true;
  std::size_t reached = 1;
  while (!stack.empty()) {
    auto v = stack.back();
    stack.pop_back();
    for (auto w : g.neighbors(v)) {
      if (!seen[w]) {
        seen[w] = true;
        ++reached;
        stack.push_back(w);
      }
    }
  }
  return reached == g.size();
}

}  // namespace bethe_csma
