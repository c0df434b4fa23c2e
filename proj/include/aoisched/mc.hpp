#pragma once

// Exact mean-AoI evaluation through the Markov chain of consecutive
// successful appearances, plus the two-source closed forms built on it.

#include <cstddef>
#include <utility>
#include <vector>

#include "aoisched/core.hpp"

namespace aoi {

/// Chain over states (i, j): the last success happened at appearance i and
/// the next one happens at appearance j. Stored row-major, alpha x alpha.
struct McChain {
  std::size_t alpha = 0;
  std::vector<double> transition;  // p_{i,j}
  std::vector<double> stationary;  // pi_{i,j} = p_{i,j} / alpha

  double p(std::size_t i, std::size_t j) const { return transition[i * alpha + j]; }
  double pi(std::size_t i, std::size_t j) const { return stationary[i * alpha + j]; }
};

/// Largest alpha^2 state space the chain evaluator accepts.
inline constexpr std::size_t kMaxChainStates = 1'000'000;

McChain build_chain(std::size_t alpha, double drop_prob);

/// Moments of a full pattern round and of the number M of extra rounds
/// before the next success.
struct CycleMoments {
  double round_mean = 0.0;  // s^ = sum_k alpha_k s_k
  double round_var = 0.0;   // v^ = sum_k alpha_k v_k
  double m_mean = 0.0;      // E[M]
  double m_second = 0.0;    // E[M^2]
};

/// E[M] and E[M^2] for M = Geom - 1 with per-round failure probability
/// rho = p^alpha.
CycleMoments cycle_moments(const SystemConfig& config, const Pattern& pattern, std::size_t n);

double mc_source_aoi(const SystemConfig& config, const Pattern& pattern, std::size_t n);

AoiReport mc_report(const SystemConfig& config, const Pattern& pattern);

/// Sparse placement vector: `length` entries, only nonzero ones stored as
/// (index, value). Long two-source placements are mostly zeros.
struct SparsePlacement {
  std::size_t length = 0;
  std::vector<std::pair<std::size_t, std::uint64_t>> nonzeros;

  std::uint64_t total() const;
};

SparsePlacement to_sparse(const PlacementVector& placement);

/// Placement of the same schedule seen from source 2: entry j counts
/// source-1 slots between the j-th and (j+1)-th source-2 slot.
SparsePlacement swapped_placement(const SparsePlacement& r);

/// sum_{i=1}^{L} p^{i-1} r~(i), where r~(i) is the sum over cyclic windows
/// of i consecutive entries of the squared window sum. O(L + nnz^2).
double window_square_series(const SparsePlacement& r, double p);

/// Closed-form (E[Delta_1], E[Delta_2]) of a two-source placement.
std::pair<double, double> two_source_aoi(const SystemConfig& config, const PlacementVector& r);
std::pair<double, double> two_source_aoi(const SystemConfig& config, const SparsePlacement& r);

AoiReport closed2_report(const SystemConfig& config, const PlacementVector& r);

/// Weighted AoI of round robin [1,2] for a two-source fleet.
double rr_aoi(const SystemConfig& config);

}  // namespace aoi
