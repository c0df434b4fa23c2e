#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "aoisched/mc.hpp"
#include "aoisched/mgf.hpp"
#include "aoisched/nots.hpp"
#include "aoisched/sams.hpp"
#include "support.hpp"

using namespace aoi;
using testing::rel_err;
using Vec = std::vector<std::uint64_t>;

namespace {

SystemConfig lossy_exp(double p1) {
  return validate_config({{2.0, 1.0, p1, 0.2, ServiceDist::exponential},
                          {3.0, 1.0, 0.9, 0.8, ServiceDist::exponential}});
}

SystemConfig bursty_pair(double p1) {
  return validate_config({{25.0, 2.0, p1, 0.04, ServiceDist::gamma},
                          {24.0, 15.0, 0.81, 0.96, ServiceDist::gamma}});
}

bool contains_rotation(const std::vector<PlacementVector>& blocks, Vec target) {
  for (const auto& b : blocks) {
    if (b.size() != target.size()) continue;
    Vec v = b.r;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v == target) return true;
      std::rotate(v.begin(), v.begin() + 1, v.end());
    }
  }
  return false;
}

}  // namespace

TEST_CASE("arrangement worked examples") {
  CHECK(arrange_placement(11, 41).r == Vec{3, 4, 4, 4, 3, 4, 4, 4, 3, 4, 4});
  CHECK(arrange_placement(5, 5).r == Vec{1, 1, 1, 1, 1});
  CHECK(arrange_placement(1, 7).r == Vec{7});
  CHECK(arrange_placement(3, 8).r == Vec{2, 3, 3});
  CHECK(arrange_placement(4, 2).r == Vec{0, 1, 0, 1});
  CHECK_THROWS_AS(arrange_placement(0, 3), InfeasibleError);
}

TEST_CASE("arrangement uses floor and ceil only and sums to alpha2") {
  for (std::uint64_t a1 = 1; a1 <= 60; ++a1) {
    for (std::uint64_t a2 = 1; a2 <= 150; a2 += 1 + a1 % 3) {
      const auto r = arrange_placement(a1, a2).r;
      REQUIRE(r.size() == a1);
      std::uint64_t sum = 0;
      for (auto v : r) {
        sum += v;
        CHECK((v == a2 / a1 || v == a2 / a1 + 1));
      }
      CHECK(sum == a2);
    }
  }
}

TEST_CASE("arrangement spreads the rare value evenly") {
  // Any window of i consecutive entries holds floor or ceil of i * a.
  for (std::uint64_t a1 = 2; a1 <= 40; ++a1) {
    for (std::uint64_t a2 = 1; a2 <= 90; a2 += 7) {
      const auto r = arrange_placement(a1, a2).r;
      for (std::size_t len = 1; len < a1; ++len) {
        std::uint64_t lo = UINT64_MAX, hi = 0;
        for (std::size_t j = 0; j < a1; ++j) {
          std::uint64_t w = 0;
          for (std::size_t k = 0; k < len; ++k) w += r[(j + k) % a1];
          lo = std::min(lo, w);
          hi = std::max(hi, w);
        }
        CHECK(hi - lo <= 2);
      }
    }
  }
}

TEST_CASE("symmetric sources give round robin") {
  for (double p : {0.0, 0.3, 0.8}) {
    const auto cfg = validate_config({{1.5, 1.0, p, 1.0, ServiceDist::exponential},
                                      {1.5, 1.0, p, 1.0, ServiceDist::exponential}});
    const auto res = nots_build(cfg);
    CHECK(res.placement.r == Vec{1});
    CHECK(res.weighted_aoi == doctest::Approx(rr_aoi(cfg)).epsilon(1e-12));
  }
}

TEST_CASE("lossy exponential pair at p1 = 0.8 beats every short pattern") {
  const auto cfg = lossy_exp(0.8);
  const auto res = nots_build(cfg);
  const double brute =
      testing::exhaustive_two_source_min(8, [&](const Pattern& p) { return mc_report(cfg, p).weighted_aoi; });
  CHECK(res.weighted_aoi <= brute * (1.0 + 1e-9));
  CHECK(res.weighted_aoi <= rr_aoi(cfg));
  CHECK(rel_err(res.weighted_aoi, mgf_weighted_aoi(cfg, res.pattern())) < 1e-9);
}

TEST_CASE("nots is no worse than sams on highly variable services") {
  for (double p1 : {0.0, 0.3, 0.6, 0.9}) {
    const auto cfg = bursty_pair(p1);
    const auto nots = nots_build(cfg);
    const auto sams = sams_build(cfg, SamsConfig::variant(3));
    CHECK(nots.weighted_aoi <= sams.report.weighted_aoi * (1.0 + 1e-9));
  }
}

TEST_CASE("refinement can reach short sub-blocks of long searches") {
  const auto trace = arrange_placement_traced(101, 269);
  CHECK(contains_rotation(trace.sub_blocks, Vec{2, 3, 3}));
  CHECK(arrange_placement(101, 269).r != Vec{2, 3, 3});
}

TEST_CASE("refinement picks the best sub-block and never hurts") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cfg = testing::random_config(rng, 2);
    const auto searched = nots_search(cfg, 1 + rng() % 60);
    const auto refined = refine_subpatterns(cfg, searched);
    CHECK(refined.weighted_aoi <= searched.weighted_aoi);

    double best = searched.weighted_aoi;
    for (const auto& b : arrange_placement_traced(searched.alpha_pair.first, searched.alpha_pair.second).sub_blocks) {
      if (b.total() == 0) continue;
      const auto [e1, e2] = two_source_aoi(cfg, b);
      best = std::min(best, cfg[0].weight * e1 + cfg[1].weight * e2);
    }
    CHECK(refined.weighted_aoi == doctest::Approx(best).epsilon(1e-14));
    const auto [e1, e2] = two_source_aoi(cfg, refined.placement);
    CHECK(rel_err(cfg[0].weight * e1 + cfg[1].weight * e2, refined.weighted_aoi) < 1e-14);
  }
}

TEST_CASE("refining a round robin result is a no-op") {
  const auto cfg = validate_config({{1.0, 0.0, 0.2, 1.0}, {1.0, 0.0, 0.2, 1.0}});
  const auto res = nots_search(cfg);
  const auto again = refine_subpatterns(cfg, res);
  CHECK(again.placement == res.placement);
  CHECK(again.weighted_aoi == res.weighted_aoi);
}

TEST_CASE("nots never loses to round robin and bounds bracket one") {
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    const auto cfg = testing::random_config(rng, 2);
    const auto res = nots_build(cfg, 20);
    CHECK(res.weighted_aoi <= rr_aoi(cfg) * (1.0 + 1e-12));
    CHECK(res.a_bounds.first <= 1.0);
    CHECK(res.a_bounds.second >= 1.0);
    CHECK(res.placement.total() == res.alpha_pair.second);
    CHECK(res.placement.size() == res.alpha_pair.first);
  }
}

TEST_CASE("resolution monotonicity is mostly observed") {
  std::mt19937_64 rng(43);
  int violations = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto cfg = testing::random_config(rng, 2);
    const double a10 = nots_search(cfg, 10).weighted_aoi;
    const double a25 = nots_search(cfg, 25).weighted_aoi;
    const double a50 = nots_search(cfg, 50).weighted_aoi;
    // 10 divides 50, so the 50-grid contains every 10-grid ratio.
    CHECK(a50 <= a10 * (1.0 + 1e-12));
    if (a25 > a10 * (1.0 + 1e-12) || a50 > a25 * (1.0 + 1e-12)) ++violations;
  }
  MESSAGE("non-nested resolution violations: " << violations << " of 20");
}

TEST_CASE("nots needs two sources") {
  const auto cfg = validate_config({{1.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 0.0, 1.0}});
  CHECK_THROWS_AS(nots_search(cfg), ConfigError);
}
