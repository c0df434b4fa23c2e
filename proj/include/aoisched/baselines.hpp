#pragma once

// Comparison schedulers: round robin, insertion search and the
// probabilistic generate-at-will policy.

#include <cstddef>
#include <vector>

#include "aoisched/core.hpp"

namespace aoi {

/// [1, 2, ..., N].
Pattern rr_pattern(std::size_t num_sources);

struct BuildResult {
  Pattern pattern;
  AoiReport report;
};

BuildResult rr_build(const SystemConfig& config);

struct IsResult {
  Pattern pattern;
  AoiReport report;
  /// Entry 0 is round robin; entry i is the pattern adopted at iteration i.
  std::vector<Pattern> pattern_trace;
  std::vector<double> aoi_trace;
};

inline constexpr std::size_t kDefaultIsMaxSize = 75;

/// Grows round robin one slot at a time, each time adopting the best of the
/// N K single-slot insertions, a new slot after slot k = 1..K (ties to the
/// smallest (k, source)).
/// Returns the best pattern seen up to `max_size` slots.
IsResult is_build(const SystemConfig& config, std::size_t max_size = kDefaultIsMaxSize);

struct PgawPolicy {
  std::vector<double> eta;
};

/// Drop-free view of a lossy P-GAW system: failed slots become a fictitious
/// extra source whose service is the eta p weighted mixture.
struct PhantomSystem {
  std::vector<double> effective_probs;
  std::vector<double> means;
  std::vector<double> second_moments;
  bool has_phantom = false;
};

PhantomSystem phantom_expand(const SystemConfig& config, const PgawPolicy& policy);

/// Per-source AoI of P-GAW from compound-geometric gap moments of the lossy
/// system.
AoiReport pgaw_aoi(const SystemConfig& config, const PgawPolicy& policy);

/// Same quantity computed on the phantom expansion.
AoiReport pgaw_aoi_phantom(const SystemConfig& config, const PgawPolicy& policy);

struct PgawOptimum {
  PgawPolicy policy;
  AoiReport report;
  std::size_t grid_points = 0;
};

inline constexpr std::size_t kMaxGridPoints = 10'000'000;
inline constexpr double kDefaultGridStep = 0.01;

/// Exhaustive search over eta on the simplex grid with spacing `step`,
/// every eta_n >= step. Throws ConfigError past kMaxGridPoints.
PgawOptimum pgaw_optimize(const SystemConfig& config, double step = kDefaultGridStep);

}  // namespace aoi
