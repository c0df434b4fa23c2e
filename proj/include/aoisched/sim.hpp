#pragma once

// Slot-level Monte-Carlo simulation of the age process, used as the ground
// truth for the analytical evaluators.
//
// Randomness: std::mt19937_64 engines seeded through std::seed_seq from
// (seed, stream id), one engine per stream (services, drops, P-GAW picks).
// Sampling uses the standard library distributions, so bit-level output is
// stable for a given standard library build.

#include <cstdint>
#include <optional>
#include <random>
#include <variant>
#include <vector>

#include "aoisched/baselines.hpp"
#include "aoisched/core.hpp"

namespace aoi {

using Rng = std::mt19937_64;

Rng make_stream(std::uint64_t seed, std::uint64_t stream);

double sample_service(ServiceDist dist, double mean, double scov, Rng& rng);

struct SimSpec {
  std::variant<Pattern, PgawPolicy> schedule;
  /// Pattern rounds, or slots for a P-GAW policy.
  std::uint64_t horizon = 1'000'000;
  /// Defaults to max(100, horizon / 100).
  std::optional<std::uint64_t> warmup;
  std::uint64_t seed = 1;
  std::size_t batches = 100;
};

struct SimReport {
  std::vector<double> per_source_aoi;
  std::vector<double> stderr_aoi;
  std::vector<double> gap_mean;
  std::vector<double> gap_second;
  /// Fraction of channel time spent on each source, failed slots included.
  std::vector<double> busy_fraction;
  std::vector<std::uint64_t> updates;
  std::uint64_t slots_simulated = 0;
  double weighted_aoi = 0.0;
  double weighted_stderr = 0.0;
};

/// Time-average AoI per source over renewal cycles that start at the first
/// success after warmup. Standard errors from batch means over the horizon.
SimReport simulate(const SystemConfig& config, const SimSpec& spec);

}  // namespace aoi
