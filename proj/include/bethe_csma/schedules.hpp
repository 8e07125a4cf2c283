#pragma once

#include <algorithm>
#include <bit>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace bethe_csma {

inline constexpr std::size_t kDefaultEnumerationCap = 24;
// Schedules are packed into 64-bit masks.
inline constexpr std::size_t kMaxEnumerationCap = 63;

/// The feasible schedules I(G), packed as bitmasks (bit i = link i active),
/// in ascending mask order. The all-idle schedule is always first.
class ScheduleSet {
 public:
  ScheduleSet() = default;
  ScheduleSet(std::size_t links, std::vector<std::uint64_t> masks)
      : links_(links), masks_(std::move(masks)) {}

  std::size_t links() const noexcept { return links_; }
  std::size_t size() const noexcept { return masks_.size(); }
  const std::vector<std::uint64_t>& masks() const noexcept { return masks_; }
  std::uint64_t operator[](std::size_t k) const noexcept { return masks_[k]; }

  static bool active(std::uint64_t mask, std::size_t link) noexcept { return (mask >> link) & 1U; }

  /// Schedule k as a 0/1 vector.
  std::vector<int> as_vector(std::size_t k) const {
    std::vector<int> v(links_);
    for (std::size_t i = 0; i < links_; ++i) v[i] = active(masks_[k], i) ? 1 : 0;
    return v;
  }

 private:
  std::size_t links_ = 0;
  std::vector<std::uint64_t> masks_;
};

inline bool is_feasible_schedule(const InterferenceGraph& g, std::uint64_t mask) {
  for (const auto& [a, b] : g.edges())
    if (ScheduleSet::active(mask, a) && ScheduleSet::active(mask, b)) return false;
  return true;
}

inline void require_enumerable(const InterferenceGraph& g, std::size_t cap) {
  if (cap > kMaxEnumerationCap) cap = kMaxEnumerationCap;
  if (g.size() > cap) {
    throw IntractableError("oracle intractable: graph has " + std::to_string(g.size()) +
                           " links, enumeration cap is " + std::to_string(cap));
  }
}

/// Exhaustive depth-first enumeration of independent sets, pruning with
/// neighbour masks. Refuses graphs above `cap` vertices.
inline ScheduleSet enumerate_feasible_schedules(const InterferenceGraph& g,
                                                std::size_t cap = kDefaultEnumerationCap) {
  require_enumerable(g, cap);
  const std::size_t n = g.size();
  std::vector<std::uint64_t> nbr(n);
  for (std::size_t i = 0; i < n; ++i) nbr[i] = g.neighbor_mask(i);

  std::vector<std::uint64_t> out;
  auto dfs = [&](auto&& self, std::size_t i, std::uint64_t current, std::uint64_t blocked) -> void {
    if (i == n) {
      out.push_back(current);
      return;
    }
    self(self, i + 1, current, blocked);
    const std::uint64_t bit = std::uint64_t{1} << i;
    if (!(blocked & bit)) self(self, i + 1, current | bit, blocked | nbr[i]);
  };
  dfs(dfs, 0, 0, 0);
  std::sort(out.begin(), out.end());
  return {n, std::move(out)};
}

/// Size of a maximum independent set.
inline std::size_t independence_number(const ScheduleSet& schedules) {
  std::size_t best = 0;
  for (auto m : schedules.masks()) best = std::max<std::size_t>(best, std::popcount(m));
  return best;
}

/// alpha(G)/n: the common per-link rate reachable by time-sharing maximum
/// independent sets. Exact capacity for vertex-transitive graphs; an upper
/// bound otherwise.
inline double symmetric_capacity(const InterferenceGraph& g, std::size_t cap = kDefaultEnumerationCap) {
  if (g.size() == 0) throw PreconditionError("symmetric_capacity of an empty graph");
  const auto schedules = enumerate_feasible_schedules(g, cap);
  return static_cast<double>(independence_number(schedules)) / static_cast<double>(g.size());
}

}  // namespace bethe_csma
