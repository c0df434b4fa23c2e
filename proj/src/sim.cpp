#include "aoisched/sim.hpp"

#include <algorithm>
#include <cmath>

namespace aoi {

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

double sample_service(ServiceDist dist, double mean, double scov, Rng& rng) {
  if (!(mean > 0.0)) throw ConfigError("service mean must be positive");
  switch (dist) {
    case ServiceDist::deterministic:
      return mean;
    case ServiceDist::exponential:
      return mean * std::exponential_distribution<double>(1.0)(rng);
    case ServiceDist::gamma:
      if (scov == 0.0) return mean;
      return std::gamma_distribution<double>(1.0 / scov, mean * scov)(rng);
  }
  return mean;
}

namespace {

struct SourceTrack {
  bool started = false;
  double last_completion = 0.0;
  double last_delay = 0.0;
  std::vector<double> area;
  std::vector<double> length;
  double gap_sum = 0.0;
  double gap_sq_sum = 0.0;
  std::uint64_t cycles = 0;
  double busy = 0.0;
};

}  // namespace

SimReport simulate(const SystemConfig& config, const SimSpec& spec) {
  const std::size_t N = config.size();
  if (N == 0) throw ConfigError("empty fleet");

  const Pattern* pattern = std::get_if<Pattern>(&spec.schedule);
  const PgawPolicy* policy = std::get_if<PgawPolicy>(&spec.schedule);
  std::discrete_distribution<std::size_t> pick;
  if (pattern) {
    occurrence_counts(*pattern, N);
  } else {
    // Reuse the analytic validation of the policy.
    pgaw_aoi(config, *policy);
    pick = std::discrete_distribution<std::size_t>(policy->eta.begin(), policy->eta.end());
  }

  const std::uint64_t horizon = spec.horizon;
  const std::uint64_t warmup = spec.warmup.value_or(std::max<std::uint64_t>(100, horizon / 100));
  if (warmup >= horizon) throw ConfigError("simulation horizon must exceed the warmup");
  const std::uint64_t measured = horizon - warmup;
  const std::size_t batches =
      static_cast<std::size_t>(std::clamp<std::uint64_t>(spec.batches, 2, measured));
  if (measured < 2) throw ConfigError("simulation needs at least two measured rounds");

  Rng services = make_stream(spec.seed, 0);
  Rng drops = make_stream(spec.seed, 1);
  Rng picks = make_stream(spec.seed, 2);
  std::uniform_real_distribution<double> coin(0.0, 1.0);

  std::vector<SourceTrack> track(N);
  for (auto& tr : track) {
    tr.area.assign(batches, 0.0);
    tr.length.assign(batches, 0.0);
  }

  SimReport report;
  double t = 0.0;
  double measure_start = 0.0;

  auto run_slot = [&](std::size_t n, bool measuring, std::size_t batch) {
    const auto& src = config[n];
    const double s = sample_service(src.dist, src.mean_service, src.scov, services);
    const bool success = !(src.drop_prob > 0.0 && coin(drops) < src.drop_prob);
    const double end = t + s;
    auto& tr = track[n];
    if (measuring) tr.busy += s;
    if (success) {
      if (tr.started) {
        const double len = end - tr.last_completion;
        tr.area[batch] += tr.last_delay * len + 0.5 * len * len;
        tr.length[batch] += len;
        const double gap = t - tr.last_completion;
        tr.gap_sum += gap;
        tr.gap_sq_sum += gap * gap;
        ++tr.cycles;
      } else if (measuring) {
        tr.started = true;
      }
      tr.last_completion = end;
      tr.last_delay = s;
    }
    t = end;
    ++report.slots_simulated;
  };

  for (std::uint64_t round = 0; round < horizon; ++round) {
    const bool measuring = round >= warmup;
    if (round == warmup) measure_start = t;
    const std::size_t batch =
        measuring ? static_cast<std::size_t>((round - warmup) * batches / measured) : 0;
    if (pattern) {
      for (std::size_t n : pattern->slots) run_slot(n, measuring, batch);
    } else {
      run_slot(pick(picks), measuring, batch);
    }
  }

  const double elapsed = t - measure_start;
  const auto B = static_cast<double>(batches);
  std::vector<double> weighted_residual(batches, 0.0);
  for (std::size_t n = 0; n < N; ++n) {
    const auto& tr = track[n];
    if (tr.cycles == 0) throw NumericalError("source " + std::to_string(n + 1) +
                                             " was never updated twice within the horizon");
    double area = 0.0;
    double length = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      area += tr.area[b];
      length += tr.length[b];
    }
    const double est = area / length;
    const double mean_len = length / B;
    double ss = 0.0;
    for (std::size_t b = 0; b < batches; ++b) {
      const double r = (tr.area[b] - est * tr.length[b]) / mean_len;
      ss += r * r;
      weighted_residual[b] += config[n].weight * r;
    }
    report.per_source_aoi.push_back(est);
    report.stderr_aoi.push_back(std::sqrt(ss / (B * (B - 1.0))));
    const auto c = static_cast<double>(tr.cycles);
    report.gap_mean.push_back(tr.gap_sum / c);
    report.gap_second.push_back(tr.gap_sq_sum / c);
    report.busy_fraction.push_back(tr.busy / elapsed);
    report.updates.push_back(tr.cycles);
  }
  report.weighted_aoi = weighted_sum(config, report.per_source_aoi);
  double ss = 0.0;
  for (double r : weighted_residual) ss += r * r;
  report.weighted_stderr = std::sqrt(ss / (B * (B - 1.0)));
  return report;
}

}  // namespace aoi
