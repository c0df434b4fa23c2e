#pragma once

#include <cstddef>
#include <vector>

#include "aoisched/core.hpp"

namespace aoi {

/// Prefix sums of slot service means and variances over two laps of a
/// pattern, so the moments of any cyclic run of slots cost O(1).
class SegmentMoments {
 public:
  SegmentMoments(const Pattern& pattern, const SystemConfig& config);

  /// Sum of service means over `length` slots starting at slot `first`
  /// (length <= pattern size).
  double mean(std::size_t first, std::size_t length) const {
    return mean_prefix_[first + length] - mean_prefix_[first];
  }
  double variance(std::size_t first, std::size_t length) const {
    return var_prefix_[first + length] - var_prefix_[first];
  }

  double round_mean() const { return mean_prefix_[size_]; }
  double round_variance() const { return var_prefix_[size_]; }

 private:
  std::size_t size_;
  std::vector<double> mean_prefix_;
  std::vector<double> var_prefix_;
};

}  // namespace aoi
