#include "aoisched/nots.hpp"

#include <algorithm>
#include <numeric>

#include "aoisched/mc.hpp"

namespace aoi {

namespace {

using Block = std::vector<std::uint64_t>;

Block join(const Block& head, const Block& tail, std::uint64_t copies) {
  Block out = head;
  for (std::uint64_t c = 0; c < copies; ++c) out.insert(out.end(), tail.begin(), tail.end());
  return out;
}

// Bound on scan steps; a_max is finite for any positive weight but can be
// large when one weight is tiny.
constexpr std::size_t kMaxScanSteps = 20'000'000;

struct Candidate {
  double aoi;
  std::uint64_t size;
};

bool improves(const Candidate& c, const NotsResult& best) {
  if (c.aoi < best.weighted_aoi) return true;
  return c.aoi == best.weighted_aoi &&
         c.size < best.alpha_pair.first + best.alpha_pair.second;
}

}  // namespace

ArrangeTrace arrange_placement_traced(std::uint64_t alpha1, std::uint64_t alpha2) {
  if (alpha1 == 0) throw InfeasibleError("alpha1 must be at least 1");
  ArrangeTrace trace;

  const std::uint64_t lo = alpha2 / alpha1;
  if (alpha2 % alpha1 == 0) {
    trace.placement.r.assign(alpha1, lo);
    trace.sub_blocks.push_back({{lo}});
    return trace;
  }

  Block floor_block{lo};
  Block ceil_block{lo + 1};
  std::uint64_t floor_count = alpha1 * (lo + 1) - alpha2;
  std::uint64_t ceil_count = alpha2 - alpha1 * lo;
  trace.sub_blocks.push_back({floor_block});
  trace.sub_blocks.push_back({ceil_block});

  bool first = true;
  while (first ? std::min(floor_count, ceil_count) >= 1 : std::min(floor_count, ceil_count) > 1) {
    first = false;
    // The rarer block type separates; the other is spread behind it.
    Block& sep = floor_count <= ceil_count ? floor_block : ceil_block;
    Block& fill = floor_count <= ceil_count ? ceil_block : floor_block;
    const std::uint64_t sep_count = std::min(floor_count, ceil_count);
    const std::uint64_t fill_count = std::max(floor_count, ceil_count);

    const std::uint64_t per = fill_count / sep_count;
    const std::uint64_t extra = fill_count % sep_count;
    Block next_floor = join(sep, fill, per);
    Block next_ceil = join(sep, fill, per + 1);

    floor_block = std::move(next_floor);
    floor_count = sep_count - extra;
    trace.sub_blocks.push_back({floor_block});
    if (extra > 0) {
      ceil_block = std::move(next_ceil);
      ceil_count = extra;
      trace.sub_blocks.push_back({ceil_block});
    } else {
      ceil_block.clear();
      ceil_count = 0;
    }
  }

  auto& r = trace.placement.r;
  r.reserve(alpha1);
  for (std::uint64_t c = 0; c < ceil_count; ++c) r.insert(r.end(), ceil_block.begin(), ceil_block.end());
  for (std::uint64_t c = 0; c < floor_count; ++c)
    r.insert(r.end(), floor_block.begin(), floor_block.end());
  return trace;
}

PlacementVector arrange_placement(std::uint64_t alpha1, std::uint64_t alpha2) {
  return arrange_placement_traced(alpha1, alpha2).placement;
}

NotsResult nots_search(const SystemConfig& config, std::uint64_t resolution) {
  if (config.size() != 2) throw ConfigError("NOTS needs exactly 2 sources");
  if (resolution == 0) throw ConfigError("NOTS resolution must be at least 1");

  const double rr = rr_aoi(config);
  const double w1 = config[0].weight;
  const double w2 = config[1].weight;

  NotsResult best;
  best.weighted_aoi = rr;
  best.per_source = two_source_aoi(config, PlacementVector{{1}});

  auto scan = [&](bool upward) {
    std::uint64_t alpha1 = resolution;
    std::uint64_t alpha2 = resolution;
    for (std::size_t step = 0;; ++step) {
      if (step == kMaxScanSteps)
        throw NumericalError("NOTS ratio scan did not reach its bound");
      const std::uint64_t g = std::gcd(alpha1, alpha2);
      const std::uint64_t a1 = alpha1 / g;
      const std::uint64_t a2 = alpha2 / g;
      const PlacementVector r = arrange_placement(a1, a2);
      const auto [e1, e2] = two_source_aoi(config, r);
      ++best.candidates;

      const double ratio = static_cast<double>(alpha2) / static_cast<double>(alpha1);
      if (upward && w1 * e1 > rr) {
        best.a_bounds.second = ratio;
        return;
      }
      if (!upward && w2 * e2 > rr) {
        best.a_bounds.first = ratio;
        return;
      }

      const Candidate c{w1 * e1 + w2 * e2, a1 + a2};
      if (improves(c, best)) {
        best.weighted_aoi = c.aoi;
        best.placement = r;
        best.alpha_pair = {a1, a2};
        best.per_source = {e1, e2};
      }
      if (upward)
        ++alpha2;
      else
        ++alpha1;
    }
  };

  scan(true);
  scan(false);
  return best;
}

NotsResult refine_subpatterns(const SystemConfig& config, const NotsResult& result) {
  if (config.size() != 2) throw ConfigError("NOTS needs exactly 2 sources");
  const auto trace = arrange_placement_traced(result.alpha_pair.first, result.alpha_pair.second);

  NotsResult best = result;
  for (const auto& block : trace.sub_blocks) {
    if (block.total() == 0) continue;
    const auto [e1, e2] = two_source_aoi(config, block);
    const Candidate c{config[0].weight * e1 + config[1].weight * e2, block.size() + block.total()};
    ++best.candidates;
    if (improves(c, best)) {
      best.weighted_aoi = c.aoi;
      best.placement = block;
      best.alpha_pair = {block.size(), block.total()};
      best.per_source = {e1, e2};
    }
  }
  return best;
}

NotsResult nots_build(const SystemConfig& config, std::uint64_t resolution) {
  return refine_subpatterns(config, nots_search(config, resolution));
}

}  // namespace aoi
