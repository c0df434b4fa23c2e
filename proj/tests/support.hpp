#pragma once

// Random instance generators and independent reference computations shared
// by the unit and acceptance suites.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "aoisched/core.hpp"

namespace aoi::testing {

inline SourceParams random_source(std::mt19937_64& rng, double max_drop = 0.9) {
  std::uniform_real_distribution<double> mean(0.5, 4.0);
  std::uniform_real_distribution<double> drop(0.0, max_drop);
  std::uniform_real_distribution<double> weight(0.05, 1.0);
  std::uniform_int_distribution<int> family(0, 2);
  SourceParams s;
  s.mean_service = mean(rng);
  s.drop_prob = drop(rng);
  s.weight = weight(rng);
  switch (family(rng)) {
    case 0:
      s.dist = ServiceDist::deterministic;
      s.scov = 0.0;
      break;
    case 1:
      s.dist = ServiceDist::exponential;
      s.scov = 1.0;
      break;
    default:
      s.dist = ServiceDist::gamma;
      s.scov = 2.0;
      break;
  }
  return s;
}

inline SystemConfig random_config(std::mt19937_64& rng, std::size_t n, double max_drop = 0.9) {
  std::vector<SourceParams> raw;
  for (std::size_t i = 0; i < n; ++i) raw.push_back(random_source(rng, max_drop));
  return validate_config(raw);
}

/// Feasible pattern of length k >= n: every source at least once.
inline Pattern random_pattern(std::mt19937_64& rng, std::size_t n, std::size_t k) {
  Pattern p;
  for (std::size_t i = 0; i < n; ++i) p.slots.push_back(i);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  while (p.slots.size() < k) p.slots.push_back(pick(rng));
  std::shuffle(p.slots.begin(), p.slots.end(), rng);
  return p;
}

/// Mean AoI of source n straight from the renewal definition: after a
/// success at appearance k the next success is the j-th following
/// appearance with probability u p^(j-1); the gap is the sum of the slots in
/// between. The series over j is summed until its terms vanish.
inline double renewal_aoi(const SystemConfig& config, const Pattern& pattern, std::size_t n) {
  const std::size_t K = pattern.size();
  std::vector<std::size_t> pos;
  for (std::size_t i = 0; i < K; ++i)
    if (pattern.slots[i] == n) pos.push_back(i);
  const std::size_t alpha = pos.size();
  const double p = config[n].drop_prob;
  const double u = 1.0 - p;

  double gap_mean = 0.0;
  double gap_second = 0.0;
  for (std::size_t k = 0; k < alpha; ++k) {
    double seg_mean = 0.0;
    double seg_var = 0.0;
    double prob = u;
    std::size_t cursor = pos[k];
    for (std::size_t j = 1; j < 100000; ++j) {
      // Walk to the j-th following appearance, adding intermediate slots.
      if (j > 1) {
        seg_mean += config[n].mean_service;
        seg_var += config[n].variance();
      }
      for (std::size_t step = 1;; ++step) {
        const std::size_t slot = (cursor + step) % K;
        if (pattern.slots[slot] == n) {
          cursor = slot;
          break;
        }
        seg_mean += config[pattern.slots[slot]].mean_service;
        seg_var += config[pattern.slots[slot]].variance();
      }
      gap_mean += prob * seg_mean;
      gap_second += prob * (seg_var + seg_mean * seg_mean);
      if (p == 0.0 || prob < 1e-300) break;
      if (prob * (seg_var + seg_mean * seg_mean) < 1e-18 * gap_second && j > 10) break;
      prob *= p;
    }
  }
  gap_mean /= static_cast<double>(alpha);
  gap_second /= static_cast<double>(alpha);

  const double s = config[n].mean_service;
  const double q = config[n].second_moment();
  const double cycle = s + gap_mean;
  const double cycle_second = gap_second + 2.0 * s * gap_mean + q;
  return (s * cycle + 0.5 * cycle_second) / cycle;
}

/// Every two-source pattern of length 2..max_k (both sources present),
/// scored by `eval`; returns the minimum.
template <class Eval>
double exhaustive_two_source_min(std::size_t max_k, Eval eval) {
  double best = INFINITY;
  for (std::size_t k = 2; k <= max_k; ++k) {
    for (std::uint32_t mask = 1; mask + 1 < (1u << k); ++mask) {
      // Fix slot 0 to source 1; rotations score the same.
      if (mask & 1u) continue;
      Pattern p;
      for (std::size_t i = 0; i < k; ++i) p.slots.push_back((mask >> i) & 1u);
      best = std::min(best, eval(p));
    }
  }
  return best;
}

/// Literal floating-point deficit round robin with a quantum that empties
/// one counter per round; near-ties (1e-9 relative) go to the lowest index.
inline std::vector<std::size_t> float_drr(const std::vector<std::size_t>& counts) {
  const std::size_t N = counts.size();
  const double K = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  std::vector<double> deficit(N, 0.0);
  std::vector<std::size_t> out;
  for (std::size_t slot = 0; slot < static_cast<std::size_t>(K); ++slot) {
    std::size_t m = 0;
    double best = INFINITY;
    for (std::size_t n = 0; n < N; ++n) {
      const double need = (1.0 - deficit[n]) * K / static_cast<double>(counts[n]);
      if (n == 0 || need < best - 1e-9 * std::max(1.0, std::abs(best))) {
        best = need;
        m = n;
      }
    }
    for (std::size_t n = 0; n < N; ++n) deficit[n] += best * static_cast<double>(counts[n]) / K;
    out.push_back(m);
    deficit[m] = 0.0;
  }
  return out;
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace aoi::testing
