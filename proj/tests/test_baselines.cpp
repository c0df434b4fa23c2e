#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "aoisched/baselines.hpp"
#include "aoisched/mc.hpp"
#include "aoisched/mgf.hpp"
#include "aoisched/nots.hpp"
#include "aoisched/sim.hpp"
#include "support.hpp"

using namespace aoi;
using testing::rel_err;

namespace {

SystemConfig lossy_exp(double p1) {
  return validate_config({{2.0, 1.0, p1, 0.2, ServiceDist::exponential},
                          {3.0, 1.0, 0.9, 0.8, ServiceDist::exponential}});
}

SystemConfig det_lossy(double p1) {
  return validate_config({{1.0, 0.0, p1, 0.5}, {1.0, 0.0, 0.9, 0.5}});
}

PgawPolicy random_policy(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  PgawPolicy pol{std::vector<double>(n)};
  double sum = 0.0;
  for (auto& e : pol.eta) sum += (e = u(rng));
  for (auto& e : pol.eta) e /= sum;
  return pol;
}

}  // namespace

TEST_CASE("round robin") {
  CHECK(format_pattern(rr_pattern(4)) == "1,2,3,4");
  const auto cfg = lossy_exp(0.5);
  const auto rr = rr_build(cfg);
  CHECK(rel_err(rr.report.weighted_aoi, rr_aoi(cfg)) < 1e-10);
}

TEST_CASE("insertion search with no room is round robin") {
  std::mt19937_64 rng(61);
  const auto cfg = testing::random_config(rng, 3);
  const auto res = is_build(cfg, 3);
  CHECK(format_pattern(res.pattern) == "1,2,3");
  CHECK(res.pattern_trace.size() == 1);
  CHECK_THROWS_AS(is_build(cfg, 2), ConfigError);
}

TEST_CASE("insertion search trace re-verifies") {
  std::mt19937_64 rng(62);
  for (int trial = 0; trial < 5; ++trial) {
    const std::size_t N = 2 + rng() % 3;
    const auto cfg = testing::random_config(rng, N);
    const auto res = is_build(cfg, N + 8);
    REQUIRE(res.pattern_trace.size() == 9);
    REQUIRE(res.aoi_trace.size() == 9);
    CHECK(res.pattern_trace[0] == rr_pattern(N));
    for (std::size_t i = 1; i < res.pattern_trace.size(); ++i) {
      const Pattern& prev = res.pattern_trace[i - 1];
      double best = INFINITY;
      Pattern arg;
      for (std::size_t k = 1; k <= prev.size(); ++k) {
        for (std::size_t n = 0; n < N; ++n) {
          Pattern cand = prev;
          cand.slots.insert(cand.slots.begin() + static_cast<long>(k), n);
          const double v = mgf_weighted_aoi(cfg, cand);
          if (v < best) {
            best = v;
            arg = cand;
          }
        }
      }
      CHECK(res.pattern_trace[i] == arg);
      CHECK(res.aoi_trace[i] == best);
    }
    const double min_trace = *std::min_element(res.aoi_trace.begin(), res.aoi_trace.end());
    CHECK(res.report.weighted_aoi == doctest::Approx(min_trace).epsilon(1e-12));
    CHECK(res.report.weighted_aoi <= mgf_weighted_aoi(cfg, rr_pattern(N)));
  }
}

TEST_CASE("insertion search tracks nots on deterministic identical services") {
  for (double p1 : {0.1, 0.5, 0.9}) {
    const auto cfg = det_lossy(p1);
    const double is = is_build(cfg).report.weighted_aoi;
    const double nots = nots_build(cfg).weighted_aoi;
    MESSAGE("p1=" << p1 << " is=" << is << " nots=" << nots);
    CHECK(std::abs(is - nots) <= 0.01 * nots);
  }
}

TEST_CASE("phantom expansion") {
  const auto one = validate_config({{1.0, 0.0, 0.5, 1.0}});
  const auto ph = phantom_expand(one, PgawPolicy{{1.0}});
  CHECK(ph.has_phantom);
  REQUIRE(ph.effective_probs.size() == 2);
  CHECK(ph.effective_probs[0] == doctest::Approx(0.5));
  CHECK(ph.effective_probs[1] == doctest::Approx(0.5));
  CHECK(ph.means[1] == doctest::Approx(1.0));
  CHECK(ph.second_moments[1] == doctest::Approx(1.0));

  const auto clean = validate_config({{1.0, 0.0, 0.0, 1.0}, {2.0, 1.0, 0.0, 1.0, ServiceDist::exponential}});
  const auto id = phantom_expand(clean, PgawPolicy{{0.3, 0.7}});
  CHECK_FALSE(id.has_phantom);
  CHECK(id.effective_probs == std::vector<double>{0.3, 0.7});

  std::mt19937_64 rng(63);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t N = 1 + rng() % 5;
    const auto cfg = testing::random_config(rng, N);
    const auto e = phantom_expand(cfg, random_policy(rng, N));
    CHECK(std::accumulate(e.effective_probs.begin(), e.effective_probs.end(), 0.0) ==
          doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("direct and phantom routes agree") {
  std::mt19937_64 rng(64);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t N = 1 + rng() % 5;
    const auto cfg = testing::random_config(rng, N);
    const auto pol = random_policy(rng, N);
    const auto a = pgaw_aoi(cfg, pol);
    const auto b = pgaw_aoi_phantom(cfg, pol);
    for (std::size_t n = 0; n < N; ++n) CHECK(rel_err(a.per_source_aoi[n], b.per_source_aoi[n]) < 1e-10);
    CHECK(rel_err(a.weighted_aoi, b.weighted_aoi) < 1e-10);
  }
}

TEST_CASE("p-gaw closed values and guards") {
  const auto one = validate_config({{1.0, 0.0, 0.0, 1.0}});
  CHECK(pgaw_aoi(one, PgawPolicy{{1.0}}).weighted_aoi == doctest::Approx(1.5).epsilon(1e-14));
  // Symmetric deterministic pair: the gap counts other-source slots before the
  // next own pick, a Geom(1/2) - 1 variable with mean 1 and second moment 3.
  const auto pair = validate_config({{1.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 0.0, 1.0}});
  const auto r = pgaw_aoi(pair, PgawPolicy{{0.5, 0.5}});
  CHECK(r.gap_mean[0] == doctest::Approx(1.0));
  CHECK(r.gap_second[0] == doctest::Approx(3.0));
  CHECK(r.per_source_aoi[0] == doctest::Approx(aoi_from_gap(1.0, 1.0, 1.0, 3.0)));
  CHECK_THROWS_AS(pgaw_aoi(pair, PgawPolicy{{1.0, 0.0}}), InfeasibleError);
  CHECK_THROWS_AS(pgaw_aoi(pair, PgawPolicy{{0.5, 0.6}}), ConfigError);
  CHECK_THROWS_AS(pgaw_aoi(pair, PgawPolicy{{1.0}}), ConfigError);
}

TEST_CASE("p-gaw matches simulation") {
  const auto pair = validate_config({{1.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 0.0, 1.0}});
  SimSpec spec;
  spec.schedule = PgawPolicy{{0.5, 0.5}};
  spec.horizon = 2'100'000;
  spec.seed = 5;
  const auto sim = simulate(pair, spec);
  const auto ana = pgaw_aoi(pair, PgawPolicy{{0.5, 0.5}});
  for (std::size_t n = 0; n < 2; ++n) {
    CHECK(sim.updates[n] > 1'000'000u);
    CHECK(rel_err(sim.per_source_aoi[n], ana.per_source_aoi[n]) < 0.01);
  }

  std::mt19937_64 rng(65);
  int outside = 0;
  for (int trial = 0; trial < 6; ++trial) {
    const auto cfg = testing::random_config(rng, 3);
    const auto pol = random_policy(rng, 3);
    SimSpec s;
    s.schedule = pol;
    s.horizon = 1'000'000;
    s.seed = 100 + trial;
    const auto est = simulate(cfg, s);
    const auto exact = pgaw_aoi(cfg, pol);
    for (std::size_t n = 0; n < 3; ++n)
      if (std::abs(est.per_source_aoi[n] - exact.per_source_aoi[n]) > 3.0 * est.stderr_aoi[n]) ++outside;
  }
  // 18 comparisons at 3 sigma; more than one miss would be very unlikely.
  CHECK(outside <= 1);
}

TEST_CASE("grid optimizer") {
  const auto sym = validate_config({{1.0, 1.0, 0.2, 1.0, ServiceDist::exponential},
                                    {1.0, 1.0, 0.2, 1.0, ServiceDist::exponential},
                                    {1.0, 1.0, 0.2, 1.0, ServiceDist::exponential}});
  const auto opt = pgaw_optimize(sym, 0.05);
  for (double e : opt.policy.eta) CHECK(std::abs(e - 1.0 / 3.0) <= 0.05 + 1e-12);
  CHECK(opt.grid_points == 171);

  const auto two = validate_config({{1.0, 0.0, 0.0, 1.0}, {1.0, 0.0, 0.0, 1.0}});
  const auto half = pgaw_optimize(two, 0.01);
  CHECK(half.policy.eta[0] == doctest::Approx(0.5));

  for (double p1 : {0.1, 0.5, 0.8}) {
    const auto cfg = lossy_exp(p1);
    const auto coarse = pgaw_optimize(cfg, 0.01);
    const auto fine = pgaw_optimize(cfg, 0.005);
    CHECK(fine.report.weighted_aoi <= coarse.report.weighted_aoi);
    CHECK(nots_build(cfg).weighted_aoi <= fine.report.weighted_aoi);
    CHECK(rel_err(coarse.report.weighted_aoi, pgaw_aoi(cfg, coarse.policy).weighted_aoi) < 1e-15);
  }

  std::vector<SourceParams> many(12, SourceParams{1.0, 0.0, 0.0, 1.0});
  CHECK_THROWS_AS(pgaw_optimize(validate_config(many), 0.01), ConfigError);
  CHECK_THROWS_AS(pgaw_optimize(two, 0.0), ConfigError);
}
