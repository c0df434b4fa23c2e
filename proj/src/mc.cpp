#include "aoisched/mc.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "aoisched/segments.hpp"

namespace aoi {

McChain build_chain(std::size_t alpha, double drop_prob) {
  if (alpha == 0) throw InfeasibleError("chain needs at least one appearance");
  if (!(drop_prob >= 0.0 && drop_prob < 1.0))
    throw ConfigError("drop probability must be in [0, 1)");
  if (alpha * alpha > kMaxChainStates)
    throw NumericalError("Markov chain with " + std::to_string(alpha * alpha) +
                         " states exceeds the cap; use the MGF evaluator");

  McChain chain;
  chain.alpha = alpha;
  chain.transition.assign(alpha * alpha, 0.0);

  if (drop_prob == 0.0) {
    // Every attempt succeeds: the next drop is always at the next appearance.
    for (std::size_t i = 0; i < alpha; ++i) chain.transition[i * alpha + (i + 1) % alpha] = 1.0;
  } else {
    const double u = 1.0 - drop_prob;
    const double norm = 1.0 - std::pow(drop_prob, static_cast<double>(alpha));
    for (std::size_t i = 0; i < alpha; ++i) {
      for (std::size_t j = 0; j < alpha; ++j) {
        // Attempts strictly after i up to and including j.
        const std::size_t steps = j > i ? j - i : j + alpha - i;
        chain.transition[i * alpha + j] =
            u * std::pow(drop_prob, static_cast<double>(steps - 1)) / norm;
      }
    }
  }

  chain.stationary.resize(chain.transition.size());
  for (std::size_t s = 0; s < chain.transition.size(); ++s)
    chain.stationary[s] = chain.transition[s] / static_cast<double>(alpha);
  return chain;
}

CycleMoments cycle_moments(const SystemConfig& config, const Pattern& pattern, std::size_t n) {
  const auto alpha = occurrence_counts(pattern, config.size());
  CycleMoments cm;
  for (std::size_t k = 0; k < config.size(); ++k) {
    cm.round_mean += static_cast<double>(alpha[k]) * config[k].mean_service;
    cm.round_var += static_cast<double>(alpha[k]) * config[k].variance();
  }
  const double rho = std::pow(config[n].drop_prob, static_cast<double>(alpha[n]));
  cm.m_mean = rho / (1.0 - rho);
  cm.m_second = rho * (1.0 + rho) / ((1.0 - rho) * (1.0 - rho));
  return cm;
}

double mc_source_aoi(const SystemConfig& config, const Pattern& pattern, std::size_t n) {
  const PatternStats stats(pattern, config.size());
  const SegmentMoments seg(pattern, config);
  const auto cm = cycle_moments(config, pattern, n);
  const auto& pos = stats.positions(n);
  const std::size_t alpha = pos.size();
  const std::size_t K = pattern.size();
  const McChain chain = build_chain(alpha, config[n].drop_prob);

  // Z_{i,j}: slots after appearance i through appearance j inclusive.
  double pi_z = 0.0;
  double pi_zz = 0.0;
  for (std::size_t i = 0; i < alpha; ++i) {
    for (std::size_t j = 0; j < alpha; ++j) {
      const double pi = chain.pi(i, j);
      if (pi == 0.0) continue;
      const std::size_t len = i == j ? K : (pos[j] + K - pos[i]) % K;
      const double z_mean = seg.mean(pos[i] + 1, len);
      const double z_second = seg.variance(pos[i] + 1, len) + z_mean * z_mean;
      pi_z += pi * z_mean;
      pi_zz += pi * z_second;
    }
  }

  const double s_n = config[n].mean_service;
  const double rounds = cm.m_mean * cm.round_mean;
  const double area = cm.m_second * cm.round_mean * cm.round_mean +
                      cm.m_mean * (2.0 * s_n * cm.round_mean + cm.round_var) + pi_zz;
  return area / (2.0 * (rounds + pi_z)) + (rounds + s_n) * pi_z / (rounds + pi_z);
}

AoiReport mc_report(const SystemConfig& config, const Pattern& pattern) {
  AoiReport report;
  report.method = EvalMethod::mc;
  const auto alpha = occurrence_counts(pattern, config.size());
  double round_mean = 0.0;
  for (std::size_t k = 0; k < config.size(); ++k)
    round_mean += static_cast<double>(alpha[k]) * config[k].mean_service;

  for (std::size_t n = 0; n < config.size(); ++n) {
    const auto& src = config[n];
    const double aoi = mc_source_aoi(config, pattern, n);
    // Invert the renewal-reward relation for the gap moments.
    const double gap_mean = round_mean / (static_cast<double>(alpha[n]) * src.success_prob()) -
                            src.mean_service;
    const double gap_second = 2.0 * aoi * (src.mean_service + gap_mean) -
                              2.0 * src.mean_service * src.mean_service -
                              4.0 * src.mean_service * gap_mean - src.second_moment();
    report.per_source_aoi.push_back(aoi);
    report.gap_mean.push_back(gap_mean);
    report.gap_second.push_back(gap_second);
    report.gap_scov.push_back((gap_second - gap_mean * gap_mean) / (gap_mean * gap_mean));
  }
  report.weighted_aoi = weighted_sum(config, report.per_source_aoi);
  return report;
}

std::uint64_t SparsePlacement::total() const {
  std::uint64_t sum = 0;
  for (const auto& [index, value] : nonzeros) sum += value;
  return sum;
}

SparsePlacement to_sparse(const PlacementVector& placement) {
  SparsePlacement sparse;
  sparse.length = placement.size();
  for (std::size_t i = 0; i < placement.size(); ++i)
    if (placement.r[i] != 0) sparse.nonzeros.emplace_back(i, placement.r[i]);
  return sparse;
}

SparsePlacement swapped_placement(const SparsePlacement& r) {
  const std::uint64_t alpha2 = r.total();
  if (alpha2 == 0) throw InfeasibleError("placement vector has no source-2 slots");

  // Source-1 slot i is preceded by cum_i source-2 slots, so it sits in gap
  // (cum_i - 1) mod alpha2 of the source-2 placement. cum_i only changes
  // after a nonzero entry, so whole runs of indices land in the same gap.
  std::map<std::uint64_t, std::uint64_t> gaps;
  auto add_run = [&](std::uint64_t cum, std::size_t first, std::size_t last) {
    if (last < first) return;
    gaps[(cum + alpha2 - 1) % alpha2] += last - first + 1;
  };
  std::uint64_t cum = 0;
  std::size_t next = 0;
  for (const auto& [index, value] : r.nonzeros) {
    add_run(cum, next, index);
    cum += value;
    next = index + 1;
  }
  if (next < r.length) add_run(cum, next, r.length - 1);

  SparsePlacement l;
  l.length = static_cast<std::size_t>(alpha2);
  l.nonzeros.assign(gaps.begin(), gaps.end());
  return l;
}

namespace {

// Partial sums sum_{t=1}^{n} t^power p^{t-1}, tabulated until the terms
// stop contributing at double precision.
class PowerSeries {
 public:
  PowerSeries(double p, std::size_t max_n, int power) : sums_(1, 0.0) {
    double pk = 1.0;  // p^{t-1}
    for (std::size_t t = 1; t <= max_n; ++t) {
      const double tt = static_cast<double>(t);
      const double term = (power == 1 ? tt : tt * tt) * pk;
      sums_.push_back(sums_.back() + term);
      if (pk == 0.0 || term < 1e-18 * sums_.back()) break;
      pk *= p;
    }
  }

  double operator()(std::size_t n) const { return sums_[std::min(n, sums_.size() - 1)]; }

 private:
  std::vector<double> sums_;
};

double own_closed_form(std::size_t alpha_own, std::uint64_t alpha_other,
                       const SourceParams& own, const SourceParams& other,
                       const SparsePlacement& placement) {
  const double p = own.drop_prob;
  const double u = 1.0 - p;
  const double a = static_cast<double>(alpha_other) / static_cast<double>(alpha_own);
  const double s = a * other.mean_service + own.mean_service;
  const double v = a * other.variance() + own.variance();
  const double norm = 1.0 - std::pow(p, static_cast<double>(alpha_own));

  const PowerSeries squares(p, alpha_own, 2);
  const double uniform = static_cast<double>(alpha_own) * a * a * squares(alpha_own);
  const double spread = window_square_series(placement, p) - uniform;

  return (1.0 + p) / (2.0 * u) * s + v / (2.0 * s) + own.mean_service +
         other.mean_service * other.mean_service * u * u /
             (2.0 * s * static_cast<double>(alpha_own) * norm) * spread;
}

}  // namespace

double window_square_series(const SparsePlacement& r, double p) {
  const std::size_t L = r.length;
  const PowerSeries linear(p, L, 1);

  double diagonal = 0.0;
  for (const auto& [index, value] : r.nonzeros) diagonal += static_cast<double>(value * value);
  double total = diagonal * linear(L);

  // Ordered pairs x != y: windows of length i holding y at offset delta
  // after x number max(0, i - delta). Each contributes 2 v_x v_y over the
  // two orders, hence the factor 2 per ordered pair.
  const auto& nz = r.nonzeros;
  for (std::size_t x = 0; x < nz.size(); ++x) {
    for (std::size_t y = 0; y < nz.size(); ++y) {
      if (x == y) continue;
      const std::size_t delta = (nz[y].first + L - nz[x].first) % L;
      const double weight = std::pow(p, static_cast<double>(delta));
      if (weight == 0.0) continue;
      total += 2.0 * static_cast<double>(nz[x].second) * static_cast<double>(nz[y].second) * weight *
               linear(L - delta);
    }
  }
  return total;
}

std::pair<double, double> two_source_aoi(const SystemConfig& config, const SparsePlacement& r) {
  if (config.size() != 2) throw ConfigError("two-source closed form needs exactly 2 sources");
  if (r.length == 0) throw InfeasibleError("empty placement vector");
  const std::uint64_t alpha2 = r.total();
  if (alpha2 == 0) throw InfeasibleError("placement vector has no source-2 slots");

  const SparsePlacement l = swapped_placement(r);
  const double e1 = own_closed_form(r.length, alpha2, config[0], config[1], r);
  const double e2 = own_closed_form(l.length, r.length, config[1], config[0], l);
  return {e1, e2};
}

std::pair<double, double> two_source_aoi(const SystemConfig& config, const PlacementVector& r) {
  return two_source_aoi(config, to_sparse(r));
}

AoiReport closed2_report(const SystemConfig& config, const PlacementVector& r) {
  const auto [e1, e2] = two_source_aoi(config, r);
  const double alpha1 = static_cast<double>(r.size());
  const double alpha2 = static_cast<double>(r.total());
  const double round_mean = alpha1 * config[0].mean_service + alpha2 * config[1].mean_service;

  AoiReport report;
  report.method = EvalMethod::closed2;
  report.per_source_aoi = {e1, e2};
  const double alphas[2] = {alpha1, alpha2};
  for (std::size_t n = 0; n < 2; ++n) {
    const auto& src = config[n];
    const double gap_mean = round_mean / (alphas[n] * src.success_prob()) - src.mean_service;
    const double gap_second = 2.0 * report.per_source_aoi[n] * (src.mean_service + gap_mean) -
                              2.0 * src.mean_service * src.mean_service -
                              4.0 * src.mean_service * gap_mean - src.second_moment();
    report.gap_mean.push_back(gap_mean);
    report.gap_second.push_back(gap_second);
    report.gap_scov.push_back((gap_second - gap_mean * gap_mean) / (gap_mean * gap_mean));
  }
  report.weighted_aoi = weighted_sum(config, report.per_source_aoi);
  return report;
}

double rr_aoi(const SystemConfig& config) {
  if (config.size() != 2) throw ConfigError("round-robin closed form needs exactly 2 sources");
  const auto& s1 = config[0];
  const auto& s2 = config[1];
  const double s = s1.mean_service + s2.mean_service;
  return s / 2.0 *
             (s1.weight * (1.0 + s1.drop_prob) / (1.0 - s1.drop_prob) +
              s2.weight * (1.0 + s2.drop_prob) / (1.0 - s2.drop_prob)) +
         (s1.variance() + s2.variance()) / (2.0 * s) + s1.mean_service * s1.weight +
         s2.mean_service * s2.weight;
}

}  // namespace aoi
