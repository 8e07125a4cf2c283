#pragma once

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace bethe_csma {

/// Per-link vector of doubles, tagged so that rates and intensities cannot be
/// mixed up at call sites.
template <class Tag>
class LinkVector {
 public:
  LinkVector() = default;
  explicit LinkVector(std::size_t n, double fill = 0.0) : values_(n, fill) {}
  explicit LinkVector(std::vector<double> values) : values_(std::move(values)) {}
  LinkVector(std::initializer_list<double> values) : values_(values) {}

  std::size_t size() const noexcept { return values_.size(); }
  bool empty() const noexcept { return values_.empty(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  auto begin() noexcept { return values_.begin(); }
  auto end() noexcept { return values_.end(); }
  auto begin() const noexcept { return values_.begin(); }
  auto end() const noexcept { return values_.end(); }

  std::span<const double> view() const noexcept { return values_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::vector<double>& values() noexcept { return values_; }

  double max() const { return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end()); }

  friend bool operator==(const LinkVector&, const LinkVector&) = default;

 private:
  std::vector<double> values_;
};

struct RateTag {};
struct IntensityTag {};

/// Service rates, target rates or Bethe marginals y; entries in [0,1].
using RateVector = LinkVector<RateTag>;
/// Log-scale transmission intensities r.
using IntensityVector = LinkVector<IntensityTag>;

}  // namespace bethe_csma
