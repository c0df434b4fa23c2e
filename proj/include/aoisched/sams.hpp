#pragma once

// Scalable weighted-AoI minimizing scheduler: continuous utilization
// optimum, frequency quantization, deficit-round-robin packet spreading and
// the search along fixed-point iterations of the gap scov.

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "aoisched/core.hpp"

namespace aoi {

struct AoiCoefficients {
  std::vector<double> a;  // w s u (c + c~)
  std::vector<double> b;  // w s (1 + c~) / u
};

AoiCoefficients aoi_coefficients(const SystemConfig& config, std::span<const double> gap_scov);

struct FrequencySolution {
  std::vector<double> tau;
  double x_star = 0.0;
  std::vector<double> freq;
  AoiCoefficients coeffs;
};

/// Minimizes sum a_n tau_n + b_n / tau_n subject to sum tau_n = 1 by
/// bisection on the monotone root equation sum sqrt(b_n / (a_n - x)) = 1,
/// x < min a_n. Fills tau and x_star. Throws NumericalError when the
/// residual does not reach 1e-12.
FrequencySolution solve_utilizations(std::span<const double> a, std::span<const double> b);

/// f_n proportional to tau_n / s_n, normalized.
std::vector<double> optimal_frequencies(std::span<const double> tau, const SystemConfig& config);

/// Root residual sum sqrt(b/(a-x)) - 1.
double utilization_residual(std::span<const double> a, std::span<const double> b, double x);

/// max_n |a_n - b_n / tau_n^2 - x*| / max(1, |x*|).
double stationarity_residual(const FrequencySolution& sol);

struct SpreadSpec {
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  double epsilon = 0.0;
};

/// K = ceil((1+eps)/f_min); largest-remainder rounding of K f_n.
SpreadSpec quantize_frequencies(std::span<const double> freq, double epsilon);

struct DrrResult {
  Pattern pattern;
  /// Deficit counters after the last slot (exactly zero when the spread
  /// hit every count).
  std::vector<double> final_deficit;
};

/// Deficit round robin with a per-round quantum that admits exactly one
/// source. Ties go to the lowest index, or to a seeded random pick among
/// the tied sources when `tie_seed` is set.
DrrResult drr_spread_traced(std::span<const std::size_t> counts,
                            std::optional<std::uint64_t> tie_seed = std::nullopt);
Pattern drr_spread(std::span<const std::size_t> counts);

/// One grouping step: sources sharing the lowest repeated count merge into
/// a group appended after the untouched entries.
struct Grouping {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> counts;
};

Grouping group_lowest(std::span<const std::size_t> counts);

/// Groups until the count vector is stable, spreads the grouped counts and
/// unwinds every level by round-robin assignment within each group.
Pattern grouped_spread(std::span<const std::size_t> counts);

struct SamsConfig {
  std::vector<double> epsilons{0.0};
  std::size_t iterations = 1;
  bool grouped = false;

  static SamsConfig variant(int level, bool grouped = false);
};

/// {0, 0.2, ..., 2}.
std::vector<double> default_epsilon_grid();

struct SamsStep {
  std::size_t iteration = 0;
  double epsilon = 0.0;
  std::size_t pattern_size = 0;
  double weighted_aoi = 0.0;
};

struct SamsResult {
  Pattern pattern;
  AoiReport report;
  std::size_t iteration = 0;
  double epsilon = 0.0;
  std::vector<SamsStep> trace;
};

using PatternEvaluator = std::function<AoiReport(const SystemConfig&, const Pattern&)>;

SamsResult sams_build(const SystemConfig& config, const SamsConfig& sams,
                      const PatternEvaluator& evaluator = {});

}  // namespace aoi
