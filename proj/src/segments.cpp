#include "aoisched/segments.hpp"

namespace aoi {

SegmentMoments::SegmentMoments(const Pattern& pattern, const SystemConfig& config)
    : size_(pattern.size()),
      mean_prefix_(2 * pattern.size() + 1, 0.0),
      var_prefix_(2 * pattern.size() + 1, 0.0) {
  for (std::size_t t = 0; t < 2 * size_; ++t) {
    const auto& src = config[pattern.slots[t % size_]];
    mean_prefix_[t + 1] = mean_prefix_[t] + src.mean_service;
    var_prefix_[t + 1] = var_prefix_[t] + src.variance();
  }
}

}  // namespace aoi
