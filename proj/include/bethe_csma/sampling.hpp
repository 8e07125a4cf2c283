#pragma once

#include <algorithm>
#include <random>

#include "graph.hpp"
#include "link_vector.hpp"

namespace bethe_csma {

/// Random point of D_B whose margin is at least `margin`. Starts from
/// independent uniforms on [margin, 1 - margin] and repairs violated edges by
/// redrawing the larger endpoint; redraws only shrink values, so repaired
/// edges stay repaired.
template <class Rng>
RateVector random_interior_point(const InterferenceGraph& g, Rng& rng, double margin = 1e-2) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](double lo, double hi) { return lo + (hi - lo) * unit(rng); };
  RateVector y(g.size());
  for (auto& v : y) v = draw(margin, 1.0 - margin);
  for (const auto& [a, b] : g.edges()) {
    if (y[a] + y[b] <= 1.0 - margin) continue;
    const auto big = y[a] >= y[b] ? a : b;
    const auto small = big == a ? b : a;
    if (y[small] < 1.0 - 3.0 * margin) {
      y[big] = draw(margin, 1.0 - margin - y[small]);
    } else {
      y[big] = draw(margin, 0.5 - margin);
      y[small] = draw(margin, 0.5 - margin);
    }
  }
  return y;
}

}  // namespace bethe_csma
