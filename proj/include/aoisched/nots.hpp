#pragma once

// Near-optimal two-source cyclic scheduling: uniform placement arrangement,
// a bounded scan over frequency ratios and sub-block refinement.

#include <cstdint>
#include <utility>
#include <vector>

#include "aoisched/core.hpp"

namespace aoi {

/// Placement produced for (alpha1, alpha2) together with every block built
/// on the way (the single-value seeds included).
struct ArrangeTrace {
  PlacementVector placement;
  std::vector<PlacementVector> sub_blocks;
};

/// Spreads alpha2 source-2 slots over alpha1 gaps using only floor(a) and
/// ceil(a), a = alpha2 / alpha1, by hierarchically interleaving blocks.
///
/// Each stage uses the rarer block type as separator and attaches floor or
/// ceil copies of the other type to it; blocks that received the extra copy
/// are listed first. Stage zero always runs when both values occur.
ArrangeTrace arrange_placement_traced(std::uint64_t alpha1, std::uint64_t alpha2);
PlacementVector arrange_placement(std::uint64_t alpha1, std::uint64_t alpha2);

struct NotsResult {
  PlacementVector placement{{1}};
  std::pair<std::uint64_t, std::uint64_t> alpha_pair{1, 1};
  double weighted_aoi = 0.0;
  std::pair<double, double> per_source{0.0, 0.0};
  std::pair<double, double> a_bounds{1.0, 1.0};  // (a_min, a_max)
  std::size_t candidates = 0;

  Pattern pattern() const { return placement_to_pattern(placement); }
};

inline constexpr std::uint64_t kDefaultNotsResolution = 50;

/// Scans a = alpha2 / alpha1 upwards (alpha1 fixed at `resolution`) until
/// w1 E[Delta_1] exceeds the round-robin AoI, then downwards (alpha2 fixed)
/// until w2 E[Delta_2] does. Every ratio is reduced to lowest terms,
/// arranged, and scored with the closed form. Never worse than round robin.
NotsResult nots_search(const SystemConfig& config,
                       std::uint64_t resolution = kDefaultNotsResolution);

/// Scores every sub-block of the result's arrangement as a standalone
/// placement and keeps the best of {result, sub-blocks}.
NotsResult refine_subpatterns(const SystemConfig& config, const NotsResult& result);

/// nots_search followed by refine_subpatterns.
NotsResult nots_build(const SystemConfig& config,
                      std::uint64_t resolution = kDefaultNotsResolution);

}  // namespace aoi
