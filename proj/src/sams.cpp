#include "aoisched/sams.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>
#include <random>

#include "aoisched/mgf.hpp"

namespace aoi {

AoiCoefficients aoi_coefficients(const SystemConfig& config, std::span<const double> gap_scov) {
  if (gap_scov.size() != config.size())
    throw ConfigError("gap scov list does not match the number of sources");
  AoiCoefficients out;
  out.a.reserve(config.size());
  out.b.reserve(config.size());
  for (std::size_t n = 0; n < config.size(); ++n) {
    const auto& src = config[n];
    // Tiny negative scov values come from cancellation in the evaluator.
    const double ct = std::max(0.0, gap_scov[n]);
    const double u = src.success_prob();
    out.a.push_back(src.weight * src.mean_service * u * (src.scov + ct));
    out.b.push_back(src.weight * src.mean_service * (1.0 + ct) / u);
  }
  return out;
}

double utilization_residual(std::span<const double> a, std::span<const double> b, double x) {
  // Neumaier summation keeps the residual meaningful down to 1e-12 at N ~ 1e3.
  double sum = 0.0;
  double comp = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double term = std::sqrt(b[n] / (a[n] - x));
    const double t = sum + term;
    comp += std::abs(sum) >= std::abs(term) ? (sum - t) + term : (term - t) + sum;
    sum = t;
  }
  return sum + comp - 1.0;
}

namespace {

constexpr double kRootTolerance = 1e-12;
constexpr int kMaxBisection = 200;

void check_coefficients(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || a.size() != b.size()) throw ConfigError("coefficient lists must be nonempty and equal length");
  for (std::size_t n = 0; n < a.size(); ++n) {
    if (!(b[n] > 0.0) || !std::isfinite(b[n])) throw ConfigError("b_n must be positive");
    if (!(a[n] >= 0.0) || !std::isfinite(a[n])) throw ConfigError("a_n must be non-negative");
  }
}

}  // namespace

FrequencySolution solve_utilizations(std::span<const double> a, std::span<const double> b) {
  check_coefficients(a, b);
  FrequencySolution sol;
  sol.coeffs.a.assign(a.begin(), a.end());
  sol.coeffs.b.assign(b.begin(), b.end());
  const std::size_t N = a.size();
  const double a_min = *std::min_element(a.begin(), a.end());
  const double a_max = *std::max_element(a.begin(), a.end());

  if (a_min == a_max) {
    // f_p is then (sum sqrt b) / sqrt(a - x) - 1, solvable directly.
    double root_sum = 0.0;
    for (double bn : b) root_sum += std::sqrt(bn);
    sol.x_star = a_min - root_sum * root_sum;
    sol.tau.reserve(N);
    for (double bn : b) sol.tau.push_back(std::sqrt(bn) / root_sum);
    return sol;
  }

  auto f = [&](double x) { return utilization_residual(a, b, x); };

  double hi = a_min - 1e-15 * (1.0 + std::abs(a_min));
  if (!(f(hi) > 0.0)) throw NumericalError("utilization root bracket has no sign change");
  double step = 1.0;
  double lo = a_min - step;
  while (f(lo) >= 0.0) {
    step *= 2.0;
    lo = a_min - step;
    if (!std::isfinite(lo)) throw NumericalError("utilization root bracket diverged");
  }

  double x = lo;
  double fx = f(lo);
  for (int it = 0; it < kMaxBisection && std::abs(fx) >= kRootTolerance; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    x = mid;
    fx = fm;
    if (fm > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  if (std::abs(fx) >= kRootTolerance) {
    for (double end : {lo, hi}) {
      const double fe = f(end);
      if (std::abs(fe) < std::abs(fx)) {
        x = end;
        fx = fe;
      }
    }
  }
  if (std::abs(fx) >= kRootTolerance)
    throw NumericalError("utilization bisection stalled at residual " + std::to_string(fx));

  sol.x_star = x;
  sol.tau.reserve(N);
  for (std::size_t n = 0; n < N; ++n) sol.tau.push_back(std::sqrt(b[n] / (a[n] - x)));
  return sol;
}

double stationarity_residual(const FrequencySolution& sol) {
  double worst = 0.0;
  const double scale = std::max(1.0, std::abs(sol.x_star));
  for (std::size_t n = 0; n < sol.tau.size(); ++n) {
    const double grad = sol.coeffs.a[n] - sol.coeffs.b[n] / (sol.tau[n] * sol.tau[n]);
    worst = std::max(worst, std::abs(grad - sol.x_star) / scale);
  }
  return worst;
}

std::vector<double> optimal_frequencies(std::span<const double> tau, const SystemConfig& config) {
  if (tau.size() != config.size()) throw ConfigError("utilization list does not match the fleet");
  std::vector<double> f(tau.size());
  double total = 0.0;
  for (std::size_t n = 0; n < tau.size(); ++n) {
    f[n] = tau[n] / config[n].mean_service;
    total += f[n];
  }
  for (double& fn : f) fn /= total;
  return f;
}

SpreadSpec quantize_frequencies(std::span<const double> freq, double epsilon) {
  if (freq.empty()) throw ConfigError("empty frequency vector");
  if (!(epsilon >= 0.0)) throw ConfigError("epsilon must be non-negative");
  const double f_min = *std::min_element(freq.begin(), freq.end());
  if (!(f_min > 0.0)) throw ConfigError("frequencies must be positive");

  // Exact ratios like 1/0.25 land a hair above an integer; don't let that
  // round K up.
  const double raw = (1.0 + epsilon) / f_min;
  const double nearest = std::round(raw);
  const double K_real = std::abs(raw - nearest) <= 1e-9 * nearest ? nearest : std::ceil(raw);
  if (K_real > 1e12) throw NumericalError("pattern size explodes for this frequency vector");
  const auto K = static_cast<std::size_t>(K_real);

  SpreadSpec spec;
  spec.epsilon = epsilon;
  spec.total = K;
  spec.counts.resize(freq.size());
  std::vector<double> frac(freq.size());
  std::size_t assigned = 0;
  for (std::size_t n = 0; n < freq.size(); ++n) {
    const double scaled = K_real * freq[n];
    const double fl = std::floor(scaled + 1e-9);
    spec.counts[n] = static_cast<std::size_t>(fl);
    frac[n] = std::max(0.0, scaled - fl);
    assigned += spec.counts[n];
  }
  if (assigned > K) throw NumericalError("frequency vector does not sum to one");

  std::vector<std::size_t> order(freq.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return frac[x] > frac[y]; });
  const std::size_t missing = K - assigned;
  if (missing > order.size()) throw NumericalError("frequency vector does not sum to one");
  for (std::size_t i = 0; i < missing; ++i) ++spec.counts[order[i]];
  for (auto& c : spec.counts) c = std::max<std::size_t>(c, 1);
  spec.total = std::accumulate(spec.counts.begin(), spec.counts.end(), std::size_t{0});
  return spec;
}

DrrResult drr_spread_traced(std::span<const std::size_t> counts,
                            std::optional<std::uint64_t> tie_seed) {
  const std::size_t N = counts.size();
  if (N == 0) throw ConfigError("empty count vector");
  for (auto c : counts)
    if (c == 0) throw InfeasibleError("every source needs at least one slot");
  const std::size_t K = std::accumulate(counts.begin(), counts.end(), std::size_t{0});

  // With the quantum sized to admit exactly one source per round, the
  // admitted source is the one whose next credit (x_n + 1) / K_n is
  // smallest. Comparing by cross-multiplication keeps it exact.
  std::vector<std::uint64_t> sent(N, 0);
  auto compare = [&](std::size_t x, std::size_t y) {
    const auto lhs = static_cast<unsigned __int128>(sent[x] + 1) * counts[y];
    const auto rhs = static_cast<unsigned __int128>(sent[y] + 1) * counts[x];
    return lhs < rhs ? -1 : (lhs > rhs ? 1 : 0);
  };
  auto earlier = [&](std::size_t x, std::size_t y) {
    const int order = compare(x, y);
    return order != 0 ? order < 0 : x < y;
  };

  DrrResult out;
  out.pattern.slots.reserve(K);

  if (!tie_seed) {
    auto later = [&](std::size_t x, std::size_t y) { return earlier(y, x); };
    std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> heap(later);
    for (std::size_t n = 0; n < N; ++n) heap.push(n);
    for (std::size_t slot = 0; slot < K; ++slot) {
      const std::size_t n = heap.top();
      heap.pop();
      out.pattern.slots.push_back(n);
      if (++sent[n] < counts[n]) heap.push(n);
    }
  } else {
    std::mt19937_64 rng(*tie_seed);
    std::vector<std::size_t> tied;
    for (std::size_t slot = 0; slot < K; ++slot) {
      tied.clear();
      for (std::size_t n = 0; n < N; ++n) {
        if (sent[n] == counts[n]) continue;
        const int order = tied.empty() ? -1 : compare(n, tied.front());
        if (order < 0) tied.clear();
        if (order <= 0) tied.push_back(n);
      }
      std::uniform_int_distribution<std::size_t> pick(0, tied.size() - 1);
      const std::size_t n = tied[pick(rng)];
      out.pattern.slots.push_back(n);
      ++sent[n];
    }
  }

  // Deficit after the last round, relative to the last admitted source.
  const std::size_t last = out.pattern.slots.back();
  out.final_deficit.resize(N);
  for (std::size_t n = 0; n < N; ++n) {
    const auto num = static_cast<__int128>(counts[n]) * static_cast<__int128>(sent[last]) -
                     static_cast<__int128>(sent[n]) * static_cast<__int128>(counts[last]);
    out.final_deficit[n] = static_cast<double>(num) / static_cast<double>(counts[last]);
  }
  return out;
}

Pattern drr_spread(std::span<const std::size_t> counts) { return drr_spread_traced(counts).pattern; }

Grouping group_lowest(std::span<const std::size_t> counts) {
  std::map<std::size_t, std::size_t> freq;
  for (auto c : counts) ++freq[c];
  std::optional<std::size_t> target;
  for (const auto& [value, times] : freq) {
    if (times > 1) {
      target = value;
      break;
    }
  }

  Grouping g;
  std::vector<std::size_t> members;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (target && counts[i] == *target) {
      members.push_back(i);
    } else {
      g.groups.push_back({i});
      g.counts.push_back(counts[i]);
    }
  }
  if (!members.empty()) {
    g.counts.push_back(*target * members.size());
    g.groups.push_back(std::move(members));
  }
  return g;
}

Pattern grouped_spread(std::span<const std::size_t> counts) {
  std::vector<Grouping> levels;
  std::vector<std::size_t> current(counts.begin(), counts.end());
  for (;;) {
    Grouping g = group_lowest(current);
    if (g.counts == current) break;
    current = g.counts;
    levels.push_back(std::move(g));
  }

  Pattern pattern = drr_spread(current);
  for (auto level = levels.rbegin(); level != levels.rend(); ++level) {
    std::vector<std::size_t> turn(level->groups.size(), 0);
    for (auto& slot : pattern.slots) {
      const auto& members = level->groups[slot];
      slot = members[turn[slot]++ % members.size()];
    }
  }
  return pattern;
}

std::vector<double> default_epsilon_grid() {
  std::vector<double> grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 5.0);
  return grid;
}

SamsConfig SamsConfig::variant(int level, bool grouped) {
  SamsConfig cfg;
  cfg.grouped = grouped;
  switch (level) {
    case 1:
      break;
    case 2:
      cfg.epsilons = default_epsilon_grid();
      break;
    case 3:
      cfg.epsilons = default_epsilon_grid();
      cfg.iterations = 3;
      break;
    default:
      throw ConfigError("SAMS variant must be 1, 2 or 3");
  }
  return cfg;
}

SamsResult sams_build(const SystemConfig& config, const SamsConfig& sams,
                      const PatternEvaluator& evaluator) {
  if (config.size() == 0) throw ConfigError("empty fleet");
  if (sams.iterations == 0) throw ConfigError("SAMS needs at least one iteration");
  if (sams.epsilons.empty()) throw ConfigError("SAMS needs at least one epsilon");
  for (double e : sams.epsilons)
    if (!(e >= 0.0)) throw ConfigError("epsilon must be non-negative");
  const PatternEvaluator eval = evaluator ? evaluator : PatternEvaluator(mgf_report);

  std::vector<double> gap_scov(config.size());
  for (std::size_t n = 0; n < config.size(); ++n) gap_scov[n] = config[n].drop_prob;

  SamsResult best;
  bool have_best = false;
  for (std::size_t iter = 0; iter < sams.iterations; ++iter) {
    const auto coeffs = aoi_coefficients(config, gap_scov);
    const auto sol = solve_utilizations(coeffs.a, coeffs.b);
    const auto freq = optimal_frequencies(sol.tau, config);

    std::map<std::vector<std::size_t>, std::pair<Pattern, AoiReport>> seen;
    const std::pair<Pattern, AoiReport>* iter_best = nullptr;
    double iter_eps = 0.0;
    for (double eps : sams.epsilons) {
      const SpreadSpec spec = quantize_frequencies(freq, eps);
      auto it = seen.find(spec.counts);
      if (it == seen.end()) {
        Pattern pattern = sams.grouped ? grouped_spread(spec.counts) : drr_spread(spec.counts);
        AoiReport report = eval(config, pattern);
        it = seen.emplace(spec.counts, std::make_pair(std::move(pattern), std::move(report))).first;
      }
      const auto& candidate = it->second;
      best.trace.push_back({iter, eps, candidate.first.size(), candidate.second.weighted_aoi});
      if (!iter_best || candidate.second.weighted_aoi < iter_best->second.weighted_aoi) {
        iter_best = &candidate;
        iter_eps = eps;
      }
    }

    if (!have_best || iter_best->second.weighted_aoi < best.report.weighted_aoi) {
      best.pattern = iter_best->first;
      best.report = iter_best->second;
      best.iteration = iter;
      best.epsilon = iter_eps;
      have_best = true;
    }
    gap_scov = iter_best->second.gap_scov;
  }
  return best;
}

}  // namespace aoi
