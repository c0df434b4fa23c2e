#include "aoisched/baselines.hpp"

#include <cmath>
#include <numeric>
#include <tuple>

#include "aoisched/mgf.hpp"

namespace aoi {

Pattern rr_pattern(std::size_t num_sources) {
  Pattern p;
  p.slots.resize(num_sources);
  std::iota(p.slots.begin(), p.slots.end(), std::size_t{0});
  return p;
}

BuildResult rr_build(const SystemConfig& config) {
  if (config.size() == 0) throw ConfigError("empty fleet");
  BuildResult out;
  out.pattern = rr_pattern(config.size());
  out.report = mgf_report(config, out.pattern);
  return out;
}

IsResult is_build(const SystemConfig& config, std::size_t max_size) {
  const std::size_t N = config.size();
  if (N == 0) throw ConfigError("empty fleet");
  if (max_size < N) throw ConfigError("IS maximum pattern size must be at least N");

  IsResult out;
  Pattern current = rr_pattern(N);
  out.pattern_trace.push_back(current);
  out.aoi_trace.push_back(mgf_weighted_aoi(config, current));

  Pattern candidate;
  while (current.size() < max_size) {
    const std::size_t K = current.size();
    double best = 0.0;
    std::size_t best_k = 0;
    std::size_t best_n = 0;
    bool found = false;
    // Insert after the k-th slot, k = 1..K.
    for (std::size_t k = 1; k <= K; ++k) {
      for (std::size_t n = 0; n < N; ++n) {
        candidate.slots.assign(current.slots.begin(), current.slots.end());
        candidate.slots.insert(candidate.slots.begin() + static_cast<std::ptrdiff_t>(k), n);
        const double aoi = mgf_weighted_aoi(config, candidate);
        if (!found || aoi < best) {
          best = aoi;
          best_k = k;
          best_n = n;
          found = true;
        }
      }
    }
    current.slots.insert(current.slots.begin() + static_cast<std::ptrdiff_t>(best_k), best_n);
    out.pattern_trace.push_back(current);
    out.aoi_trace.push_back(best);
  }

  std::size_t arg = 0;
  for (std::size_t i = 1; i < out.aoi_trace.size(); ++i)
    if (out.aoi_trace[i] < out.aoi_trace[arg]) arg = i;
  out.pattern = out.pattern_trace[arg];
  out.report = mgf_report(config, out.pattern);
  return out;
}

namespace {

void check_policy(const SystemConfig& config, const PgawPolicy& policy) {
  if (policy.eta.size() != config.size())
    throw ConfigError("selection probabilities do not match the fleet");
  double total = 0.0;
  for (double e : policy.eta) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw ConfigError("selection probabilities must be >= 0");
    total += e;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("selection probabilities must sum to 1");
  for (double e : policy.eta)
    if (e == 0.0) throw InfeasibleError("a source with zero selection probability is never updated");
}

// Gap moments when every slot ends the gap with probability `hit` and
// otherwise lasts a draw from a mixture with moments (m1, m2).
std::pair<double, double> compound_geometric(double hit, double m1, double m2) {
  const double ej = (1.0 - hit) / hit;
  const double ej2 = (1.0 - hit) * (2.0 - hit) / (hit * hit);
  return {ej * m1, ej * (m2 - m1 * m1) + ej2 * m1 * m1};
}

AoiReport assemble(const SystemConfig& config, std::vector<double> gap_mean,
                   std::vector<double> gap_second) {
  AoiReport report;
  for (std::size_t n = 0; n < config.size(); ++n) {
    const auto& src = config[n];
    report.per_source_aoi.push_back(
        aoi_from_gap(src.mean_service, src.second_moment(), gap_mean[n], gap_second[n]));
    const double m = gap_mean[n];
    report.gap_scov.push_back(m > 0.0 ? (gap_second[n] - m * m) / (m * m) : 0.0);
  }
  report.gap_mean = std::move(gap_mean);
  report.gap_second = std::move(gap_second);
  report.weighted_aoi = weighted_sum(config, report.per_source_aoi);
  return report;
}

}  // namespace

PhantomSystem phantom_expand(const SystemConfig& config, const PgawPolicy& policy) {
  check_policy(config, policy);
  PhantomSystem sys;
  double lost = 0.0;
  double lost_m1 = 0.0;
  double lost_m2 = 0.0;
  for (std::size_t n = 0; n < config.size(); ++n) {
    const auto& src = config[n];
    sys.effective_probs.push_back(policy.eta[n] * src.success_prob());
    sys.means.push_back(src.mean_service);
    sys.second_moments.push_back(src.second_moment());
    const double drop = policy.eta[n] * src.drop_prob;
    lost += drop;
    lost_m1 += drop * src.mean_service;
    lost_m2 += drop * src.second_moment();
  }
  if (lost > 0.0) {
    sys.has_phantom = true;
    sys.effective_probs.push_back(lost);
    sys.means.push_back(lost_m1 / lost);
    sys.second_moments.push_back(lost_m2 / lost);
  }
  return sys;
}

AoiReport pgaw_aoi(const SystemConfig& config, const PgawPolicy& policy) {
  check_policy(config, policy);
  const std::size_t N = config.size();
  std::vector<double> gap_mean(N);
  std::vector<double> gap_second(N);
  for (std::size_t n = 0; n < N; ++n) {
    const double hit = policy.eta[n] * config[n].success_prob();
    // Non-success slots: other sources in any outcome, or an own failure.
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t m = 0; m < N; ++m) {
      const double share = m == n ? policy.eta[n] * config[n].drop_prob : policy.eta[m];
      m1 += share * config[m].mean_service;
      m2 += share * config[m].second_moment();
    }
    if (hit < 1.0) {
      m1 /= 1.0 - hit;
      m2 /= 1.0 - hit;
    }
    std::tie(gap_mean[n], gap_second[n]) = compound_geometric(hit, m1, m2);
  }
  return assemble(config, std::move(gap_mean), std::move(gap_second));
}

AoiReport pgaw_aoi_phantom(const SystemConfig& config, const PgawPolicy& policy) {
  const PhantomSystem sys = phantom_expand(config, policy);
  const std::size_t N = config.size();
  std::vector<double> gap_mean(N);
  std::vector<double> gap_second(N);
  for (std::size_t n = 0; n < N; ++n) {
    const double hit = sys.effective_probs[n];
    double m1 = 0.0;
    double m2 = 0.0;
    for (std::size_t m = 0; m < sys.effective_probs.size(); ++m) {
      if (m == n) continue;
      m1 += sys.effective_probs[m] * sys.means[m];
      m2 += sys.effective_probs[m] * sys.second_moments[m];
    }
    if (hit < 1.0) {
      m1 /= 1.0 - hit;
      m2 /= 1.0 - hit;
    }
    std::tie(gap_mean[n], gap_second[n]) = compound_geometric(hit, m1, m2);
  }
  return assemble(config, std::move(gap_mean), std::move(gap_second));
}

PgawOptimum pgaw_optimize(const SystemConfig& config, double step) {
  const std::size_t N = config.size();
  if (N == 0) throw ConfigError("empty fleet");
  if (!(step > 0.0 && step <= 1.0)) throw ConfigError("grid step must be in (0, 1]");
  const double units_real = std::round(1.0 / step);
  if (std::abs(units_real * step - 1.0) > 1e-9)
    throw ConfigError("grid step must divide 1");
  const auto M = static_cast<std::size_t>(units_real);
  if (M < N) throw ConfigError("grid too coarse: every source needs eta >= step");

  // Compositions of M into N positive parts: C(M - 1, N - 1).
  double points = 1.0;
  for (std::size_t i = 1; i < N; ++i) {
    points = points * static_cast<double>(M - N + i) / static_cast<double>(i);
    if (points > static_cast<double>(kMaxGridPoints))
      throw ConfigError("P-GAW grid exceeds " + std::to_string(kMaxGridPoints) + " points");
  }

  PgawOptimum best;
  bool have = false;
  std::vector<std::size_t> parts(N, 1);
  PgawPolicy policy;
  policy.eta.resize(N);

  // Lexicographic walk over parts[0..N-2]; the last part takes the rest.
  auto visit = [&]() {
    std::size_t used = 0;
    for (std::size_t i = 0; i + 1 < N; ++i) used += parts[i];
    parts[N - 1] = M - used;
    for (std::size_t i = 0; i < N; ++i)
      policy.eta[i] = static_cast<double>(parts[i]) / static_cast<double>(M);
    AoiReport report = pgaw_aoi(config, policy);
    ++best.grid_points;
    if (!have || report.weighted_aoi < best.report.weighted_aoi) {
      best.policy = policy;
      best.report = std::move(report);
      have = true;
    }
  };

  // Odometer over parts[0..N-2]; a free coordinate may grow while the last
  // part keeps at least one unit.
  std::size_t used = N - 1;
  for (;;) {
    visit();
    bool advanced = false;
    for (std::size_t i = N - 1; i-- > 0;) {
      if (used + 1 <= M - 1) {
        ++parts[i];
        ++used;
        advanced = true;
        break;
      }
      used -= parts[i] - 1;
      parts[i] = 1;
    }
    if (!advanced) break;
  }
  return best;
}

}  // namespace aoi
