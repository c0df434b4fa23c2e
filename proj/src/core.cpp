#include "aoisched/core.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>

namespace aoi {

std::string_view to_string(ServiceDist dist) {
  switch (dist) {
    case ServiceDist::deterministic: return "deterministic";
    case ServiceDist::exponential: return "exponential";
    case ServiceDist::gamma: return "gamma";
  }
  return "unknown";
}

ServiceDist parse_dist(std::string_view name) {
  if (name == "deterministic" || name == "det") return ServiceDist::deterministic;
  if (name == "exponential" || name == "exp") return ServiceDist::exponential;
  if (name == "gamma") return ServiceDist::gamma;
  throw ConfigError("unknown service distribution '" + std::string(name) + "'");
}

SystemConfig validate_config(std::vector<SourceParams> raw) {
  if (raw.empty()) throw ConfigError("configuration has no sources");

  double total_weight = 0.0;
  for (std::size_t n = 0; n < raw.size(); ++n) {
    auto& src = raw[n];
    const std::string where = "source " + std::to_string(n + 1) + ": ";
    if (!(std::isfinite(src.mean_service) && src.mean_service > 0.0))
      throw ConfigError(where + "mean service time must be positive");
    if (!(std::isfinite(src.weight) && src.weight > 0.0))
      throw ConfigError(where + "weight must be positive");
    if (!(std::isfinite(src.scov) && src.scov >= 0.0))
      throw ConfigError(where + "scov must be non-negative");
    if (!(src.drop_prob >= 0.0)) throw ConfigError(where + "drop probability must be >= 0");
    if (!(src.drop_prob < 1.0)) throw ConfigError(where + "drop probability must be < 1");

    switch (src.dist) {
      case ServiceDist::deterministic:
        if (src.scov != 0.0) throw ConfigError(where + "deterministic service requires scov = 0");
        break;
      case ServiceDist::exponential:
        if (src.scov != 1.0) throw ConfigError(where + "exponential service requires scov = 1");
        break;
      case ServiceDist::gamma:
        break;
    }
    total_weight += src.weight;
  }

  // Already-normalized input (up to summation rounding) is left
  // bit-identical so configs round-trip.
  if (std::abs(total_weight - 1.0) > 1e-12) {
    for (auto& src : raw) src.weight /= total_weight;
  }

  SystemConfig config;
  config.sources_ = std::move(raw);
  return config;
}

Pattern parse_pattern(std::string_view text) {
  Pattern pattern;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view token = text.substr(pos, end - pos);
    while (!token.empty() && (token.front() == ' ' || token.front() == '[')) token.remove_prefix(1);
    while (!token.empty() && (token.back() == ' ' || token.back() == ']')) token.remove_suffix(1);

    std::size_t value = 0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size() || value == 0)
      throw InfeasibleError("invalid pattern entry '" + std::string(token) + "'");
    pattern.slots.push_back(value - 1);
    pos = end + 1;
  }
  return pattern;
}

std::string format_pattern(const Pattern& pattern) {
  std::ostringstream out;
  for (std::size_t k = 0; k < pattern.slots.size(); ++k) {
    if (k) out << ',';
    out << pattern.slots[k] + 1;
  }
  return out.str();
}

std::vector<std::size_t> occurrence_counts(const Pattern& pattern, std::size_t num_sources) {
  std::vector<std::size_t> alpha(num_sources, 0);
  for (std::size_t slot : pattern.slots) {
    if (slot >= num_sources)
      throw InfeasibleError("pattern references source " + std::to_string(slot + 1) +
                            " but only " + std::to_string(num_sources) + " are configured");
    ++alpha[slot];
  }
  for (std::size_t n = 0; n < num_sources; ++n) {
    if (alpha[n] == 0)
      throw InfeasibleError("infeasible pattern: source " + std::to_string(n + 1) +
                            " never appears");
  }
  return alpha;
}

PatternStats::PatternStats(const Pattern& pattern, std::size_t num_sources)
    : slots_(pattern.slots),
      alpha_(occurrence_counts(pattern, num_sources)),
      positions_(num_sources) {
  for (std::size_t n = 0; n < num_sources; ++n) positions_[n].reserve(alpha_[n]);
  for (std::size_t k = 0; k < slots_.size(); ++k) positions_[slots_[k]].push_back(k);
}

std::size_t PatternStats::subpattern_length(std::size_t n, std::size_t k) const {
  const auto& pos = positions_[n];
  const std::size_t from = pos[k];
  const std::size_t to = k + 1 < pos.size() ? pos[k + 1] : pos[0] + slots_.size();
  return to - from - 1;
}

std::vector<std::size_t> PatternStats::subpattern_counts(std::size_t n, std::size_t k) const {
  std::vector<std::size_t> counts(num_sources(), 0);
  const std::size_t start = positions_[n][k];
  const std::size_t len = subpattern_length(n, k);
  for (std::size_t t = 1; t <= len; ++t) ++counts[slots_[(start + t) % slots_.size()]];
  return counts;
}

PatternStats pattern_stats(const Pattern& pattern, const SystemConfig& config) {
  return PatternStats(pattern, config.size());
}

std::uint64_t PlacementVector::total() const {
  return std::accumulate(r.begin(), r.end(), std::uint64_t{0});
}

Pattern placement_to_pattern(const PlacementVector& placement) {
  if (placement.r.empty()) throw InfeasibleError("empty placement vector");
  if (placement.total() == 0) throw InfeasibleError("placement vector has no source-2 slots");
  Pattern pattern;
  pattern.slots.reserve(placement.size() + placement.total());
  for (std::uint64_t count : placement.r) {
    pattern.slots.push_back(0);
    pattern.slots.insert(pattern.slots.end(), count, 1);
  }
  return pattern;
}

PlacementVector pattern_to_placement(const Pattern& pattern) {
  const auto alpha = occurrence_counts(pattern, 2);
  (void)alpha;
  const auto& slots = pattern.slots;
  const std::size_t first = static_cast<std::size_t>(
      std::find(slots.begin(), slots.end(), std::size_t{0}) - slots.begin());

  PlacementVector placement;
  for (std::size_t t = 0; t < slots.size(); ++t) {
    const std::size_t slot = slots[(first + t) % slots.size()];
    if (slot == 0)
      placement.r.push_back(0);
    else
      ++placement.r.back();
  }
  return placement;
}

std::string_view to_string(EvalMethod method) {
  switch (method) {
    case EvalMethod::mc: return "mc";
    case EvalMethod::mgf: return "mgf";
    case EvalMethod::closed2: return "closed2";
    case EvalMethod::rr: return "rr";
    case EvalMethod::sim: return "sim";
  }
  return "unknown";
}

EvalMethod parse_method(std::string_view name) {
  if (name == "mc") return EvalMethod::mc;
  if (name == "mgf") return EvalMethod::mgf;
  if (name == "closed2") return EvalMethod::closed2;
  if (name == "rr") return EvalMethod::rr;
  if (name == "sim") return EvalMethod::sim;
  throw ConfigError("unknown evaluation method '" + std::string(name) + "'");
}

double weighted_sum(const SystemConfig& config, std::span<const double> per_source) {
  double total = 0.0;
  for (std::size_t n = 0; n < config.size(); ++n) total += config[n].weight * per_source[n];
  return total;
}

}  // namespace aoi
