#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "aoisched/mc.hpp"
#include "aoisched/mgf.hpp"
#include "aoisched/sim.hpp"
#include "support.hpp"

using namespace aoi;
using testing::rel_err;

TEST_CASE("truncated products") {
  const Mgf2 unit = Mgf2::from_moments(1.0, 1.0);
  const std::size_t one = 1;
  const Mgf2 same = mgf_product(std::span(&unit, 1), std::span(&one, 1));
  CHECK(same.m1 == doctest::Approx(1.0));
  CHECK(same.m2 == doctest::Approx(0.5));

  const std::size_t two = 2;
  const Mgf2 twice = mgf_product(std::span(&unit, 1), std::span(&two, 1));
  CHECK(twice.mean() == doctest::Approx(2.0));
  CHECK(twice.m2 == doctest::Approx(2.0));

  const Mgf2 terms[] = {Mgf2::from_moments(1.0, 2.0), Mgf2::from_moments(2.0, 8.0)};
  const std::size_t mult[] = {1, 1};
  const Mgf2 sum = mgf_product(terms, mult);
  CHECK(sum.mean() == doctest::Approx(3.0));
  CHECK(sum.second_moment() == doctest::Approx(14.0));
  // Same as the series product.
  const Mgf2 direct = terms[0] * terms[1];
  CHECK(direct.second_moment() == doctest::Approx(14.0));
  CHECK(direct.m0 == 1.0);
}

TEST_CASE("drop-free gap is the single sub-pattern") {
  const auto cfg = validate_config({{1.5, 0.0, 0.0, 1.0}, {2.0, 1.0, 0.3, 1.0, ServiceDist::exponential}});
  const Pattern p = parse_pattern("1,2,2");
  const auto g = gap_moments(cfg, p, PatternStats(p, 2), 0);
  CHECK(g.mean == doctest::Approx(4.0));
  // E[(S2 + S2')^2] = 2 * 8 + 2 * 2 * 2.
  CHECK(g.second == doctest::Approx(24.0));
}

TEST_CASE("geometric gap of lossy round robin") {
  const auto cfg = validate_config({{1.0, 0.0, 0.5, 1.0}, {1.0, 0.0, 0.0, 1.0}});
  const Pattern p = parse_pattern("1,2");
  const auto g = gap_moments(cfg, p, PatternStats(p, 2), 0);
  CHECK(g.mean == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(g.second == doctest::Approx(17.0).epsilon(1e-14));
  CHECK(g.scov == doctest::Approx(8.0 / 9.0).epsilon(1e-14));
  CHECK(mgf_source_aoi(cfg, p, 0) == doctest::Approx(4.0).epsilon(1e-14));
}

TEST_CASE("single source") {
  const auto cfg = validate_config({{1.0, 0.0, 0.0, 1.0}});
  CHECK(mgf_source_aoi(cfg, parse_pattern("1"), 0) == doctest::Approx(1.5));
  CHECK(mgf_weighted_aoi(cfg, parse_pattern("1,1,1")) == doctest::Approx(1.5));
}

TEST_CASE("gap invariants and the utilization identity") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t N = 1 + rng() % 5;
    const auto cfg = testing::random_config(rng, N);
    const Pattern p = testing::random_pattern(rng, N, N + rng() % 15);
    const PatternStats st(p, N);
    double round = 0.0;
    for (std::size_t m = 0; m < N; ++m) round += static_cast<double>(st.alpha(m)) * cfg[m].mean_service;
    for (std::size_t n = 0; n < N; ++n) {
      const auto g = gap_moments(cfg, p, st, n);
      CHECK(g.second >= g.mean * g.mean * (1.0 - 1e-12));
      const double drop_free = (round - static_cast<double>(st.alpha(n)) * cfg[n].mean_service) /
                               static_cast<double>(st.alpha(n));
      CHECK(g.mean >= drop_free * (1.0 - 1e-12));
      const double tau = static_cast<double>(st.alpha(n)) * cfg[n].mean_service / round;
      const double lhs = cfg[n].mean_service + g.mean;
      const double rhs = cfg[n].mean_service / cfg[n].success_prob() / tau;
      CHECK(rel_err(lhs, rhs) < 1e-10);
    }
  }
}

TEST_CASE("equally spaced deterministic slots have zero gap scov") {
  const auto cfg = validate_config({{1.0, 0.0, 0.0, 1.0}, {2.0, 0.0, 0.0, 1.0}, {2.0, 0.0, 0.0, 1.0}});
  const Pattern p = parse_pattern("1,2,1,3,1,2,1,3");
  const auto r = mgf_report(cfg, p);
  CHECK(std::abs(r.gap_scov[0]) < 1e-12);
}

TEST_CASE("both AoI forms agree") {
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> pos(0.1, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double s = pos(rng), c = pos(rng) / 5.0, gm = pos(rng), gc = pos(rng) / 5.0;
    const double a = aoi_from_gap(s, s * s * (1 + c), gm, gm * gm * (1 + gc));
    CHECK(rel_err(aoi_from_gap_scov(s, c, gm, gc), a) < 1e-12);
  }
}

TEST_CASE("mgf matches mc on random instances") {
  std::mt19937_64 rng(33);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t N = 1 + rng() % 4;
    const auto cfg = testing::random_config(rng, N);
    const Pattern p = testing::random_pattern(rng, N, N + rng() % (11 - N));
    const auto a = mgf_report(cfg, p);
    const auto b = mc_report(cfg, p);
    for (std::size_t n = 0; n < N; ++n) {
      CHECK(rel_err(a.per_source_aoi[n], b.per_source_aoi[n]) < 1e-8);
      CHECK(rel_err(a.gap_second[n], b.gap_second[n]) < 1e-7);
    }
    CHECK(rel_err(a.weighted_aoi, weighted_sum(cfg, a.per_source_aoi)) < 1e-15);
  }
}

TEST_CASE("gap second moment matches simulation") {
  const auto cfg = validate_config({{1.0, 1.0, 0.3, 1.0, ServiceDist::exponential},
                                    {2.0, 0.0, 0.1, 2.0},
                                    {0.5, 2.0, 0.5, 1.0, ServiceDist::gamma}});
  const Pattern p = parse_pattern("1,2,3,1,3,3");
  SimSpec spec;
  spec.schedule = p;
  spec.horizon = 1'200'000;
  spec.seed = 99;
  const auto sim = simulate(cfg, spec);
  const auto r = mgf_report(cfg, p);
  for (std::size_t n = 0; n < 3; ++n) {
    CHECK(sim.updates[n] > 1'000'000u);
    CHECK(rel_err(sim.gap_second[n], r.gap_second[n]) < 0.01);
  }
}
