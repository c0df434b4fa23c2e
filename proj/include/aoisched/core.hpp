#pragma once

// Domain types shared by every evaluator and scheduler: source parameters,
// the validated fleet, cyclic patterns and their sub-pattern combinatorics.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace aoi {

// Errors map one-to-one onto the CLI exit codes (1, 2, 3).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class InfeasibleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ServiceDist { deterministic, exponential, gamma };

std::string_view to_string(ServiceDist dist);
ServiceDist parse_dist(std::string_view name);

/// Service-time moments, drop probability and weight of one source.
///
/// `scov` is the squared coefficient of variation of the service time; the
/// second moment is derived as mean^2 (1 + scov). `dist` only matters to the
/// simulator, the analytical evaluators depend on the first two moments.
struct SourceParams {
  double mean_service = 1.0;
  double scov = 0.0;
  double drop_prob = 0.0;
  double weight = 1.0;
  ServiceDist dist = ServiceDist::deterministic;

  double second_moment() const { return mean_service * mean_service * (1.0 + scov); }
  double variance() const { return mean_service * mean_service * scov; }
  double success_prob() const { return 1.0 - drop_prob; }

  bool operator==(const SourceParams&) const = default;
};

/// A validated fleet. Sources keep their input order; weights sum to one.
class SystemConfig {
 public:
  SystemConfig() = default;

  std::size_t size() const { return sources_.size(); }
  const SourceParams& operator[](std::size_t n) const { return sources_[n]; }
  std::span<const SourceParams> sources() const { return sources_; }

  bool operator==(const SystemConfig&) const = default;

 private:
  friend SystemConfig validate_config(std::vector<SourceParams> raw);
  std::vector<SourceParams> sources_;
};

/// Checks every source, normalizes the weights and fixes `scov` for the
/// deterministic/exponential families. Throws ConfigError.
SystemConfig validate_config(std::vector<SourceParams> raw);

/// Cyclic transmission order. Slots hold zero-based source indices; the
/// text form (parse_pattern / format_pattern) is one-based.
struct Pattern {
  std::vector<std::size_t> slots;

  std::size_t size() const { return slots.size(); }
  bool operator==(const Pattern&) const = default;
};

Pattern parse_pattern(std::string_view text);
std::string format_pattern(const Pattern& pattern);

/// Per-source occurrence counts of `pattern`; throws InfeasibleError when an
/// index is out of range or a source never appears.
std::vector<std::size_t> occurrence_counts(const Pattern& pattern, std::size_t num_sources);

/// Occurrence counts alpha_n and the slot positions of every appearance.
///
/// Sub-pattern k of source n is the run of slots strictly between its k-th
/// and (k+1)-th appearance, wrapping around the end of the pattern. Counts
/// of other sources inside a sub-pattern are produced on demand, since
/// materialising all of them costs O(N K).
class PatternStats {
 public:
  PatternStats(const Pattern& pattern, std::size_t num_sources);

  std::size_t num_sources() const { return positions_.size(); }
  std::size_t pattern_size() const { return slots_.size(); }
  std::size_t alpha(std::size_t n) const { return positions_[n].size(); }
  const std::vector<std::size_t>& alphas() const { return alpha_; }
  const std::vector<std::size_t>& positions(std::size_t n) const { return positions_[n]; }

  /// Number of slots in sub-pattern k of source n.
  std::size_t subpattern_length(std::size_t n, std::size_t k) const;

  /// alpha_{n,k,m} for every m (entry n is always zero).
  std::vector<std::size_t> subpattern_counts(std::size_t n, std::size_t k) const;

 private:
  std::vector<std::size_t> slots_;
  std::vector<std::size_t> alpha_;
  std::vector<std::vector<std::size_t>> positions_;
};

PatternStats pattern_stats(const Pattern& pattern, const SystemConfig& config);

/// Two-source schedule encoding: r[i] counts source-2 slots between the i-th
/// and (i+1)-th source-1 slot.
struct PlacementVector {
  std::vector<std::uint64_t> r;

  std::size_t size() const { return r.size(); }
  std::uint64_t total() const;
  bool operator==(const PlacementVector&) const = default;
};

Pattern placement_to_pattern(const PlacementVector& placement);

/// Inverse of placement_to_pattern; the pattern is read starting from its
/// first source-1 slot. Throws InfeasibleError unless exactly two sources
/// appear.
PlacementVector pattern_to_placement(const Pattern& pattern);

enum class EvalMethod { mc, mgf, closed2, rr, sim };

std::string_view to_string(EvalMethod method);
EvalMethod parse_method(std::string_view name);

struct AoiReport {
  std::vector<double> per_source_aoi;
  std::vector<double> gap_mean;
  std::vector<double> gap_second;
  std::vector<double> gap_scov;
  double weighted_aoi = 0.0;
  EvalMethod method = EvalMethod::mgf;
};

/// Sum of w_n * per_source_aoi[n].
double weighted_sum(const SystemConfig& config, std::span<const double> per_source);

}  // namespace aoi
