#include "aoisched/mgf.hpp"

#include <cmath>

#include "aoisched/segments.hpp"

namespace aoi {

Mgf2 mgf_product(std::span<const Mgf2> terms, std::span<const std::size_t> multiplicities) {
  double constant = 1.0;
  double mean = 0.0;
  double variance = 0.0;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    const double k = static_cast<double>(multiplicities[i]);
    const double mu = t.m1 / t.m0;
    const double second = 2.0 * t.m2 / t.m0;
    constant *= std::pow(t.m0, k);
    mean += k * mu;
    variance += k * (second - mu * mu);
  }
  return constant * Mgf2::from_moments(mean, variance + mean * mean);
}

namespace {

// MGFs of the sub-patterns of source n, indexed by appearance k.
std::vector<Mgf2> subpattern_mgfs(const SegmentMoments& seg, const PatternStats& stats,
                                  std::size_t n) {
  const auto& pos = stats.positions(n);
  std::vector<Mgf2> out(pos.size());
  for (std::size_t k = 0; k < pos.size(); ++k) {
    const std::size_t len = stats.subpattern_length(n, k);
    const double mean = seg.mean(pos[k] + 1, len);
    const double var = seg.variance(pos[k] + 1, len);
    out[k] = Mgf2::from_moments(mean, var + mean * mean);
  }
  return out;
}

std::vector<GapMgfCoeffs> coeffs_from(const SourceParams& src, const std::vector<Mgf2>& sub) {
  const std::size_t alpha = sub.size();
  const double p = src.drop_prob;
  const double u = src.success_prob();
  const Mgf2 retry = p * Mgf2::from_moments(src.mean_service, src.second_moment());

  std::vector<GapMgfCoeffs> out(alpha);
  for (std::size_t k = 0; k < alpha; ++k) {
    // running = p^{j-1} G_n^{j-1} prod_{l=1..j} G_{n,k+l-1}
    Mgf2 running = sub[k];
    Mgf2 numerator = u * running;
    for (std::size_t j = 2; j <= alpha; ++j) {
      running = running * retry * sub[(k + j - 1) % alpha];
      numerator += u * running;
    }
    const Mgf2 denominator = Mgf2{1.0, 0.0, 0.0} - retry * running;

    auto& c = out[k];
    c.constant = 1.0 - std::pow(p, static_cast<double>(alpha));
    c.a = numerator.m1;
    c.b = numerator.m2;
    c.c = denominator.m1;
    c.d = denominator.m2;
  }
  return out;
}

GapMoments gap_from(const SourceParams& src, const std::vector<Mgf2>& sub) {
  const double alpha = static_cast<double>(sub.size());
  double sub_mean = 0.0;
  for (const auto& g : sub) sub_mean += g.mean();

  GapMoments gap;
  gap.mean = (src.drop_prob * src.mean_service + sub_mean / alpha) / src.success_prob();

  double second = 0.0;
  for (const auto& c : coeffs_from(src, sub)) second += c.second_derivative();
  gap.second = second / alpha;
  gap.scov = gap.mean > 0.0 ? (gap.second - gap.mean * gap.mean) / (gap.mean * gap.mean) : 0.0;
  return gap;
}

}  // namespace

std::vector<GapMgfCoeffs> gap_mgf_coeffs(const SystemConfig& config, const Pattern& pattern,
                                         const PatternStats& stats, std::size_t n) {
  const SegmentMoments seg(pattern, config);
  return coeffs_from(config[n], subpattern_mgfs(seg, stats, n));
}

GapMoments gap_moments(const SystemConfig& config, const Pattern& pattern,
                       const PatternStats& stats, std::size_t n) {
  const SegmentMoments seg(pattern, config);
  return gap_from(config[n], subpattern_mgfs(seg, stats, n));
}

double aoi_from_gap(double service_mean, double service_second, double gap_mean,
                    double gap_second) {
  return (2.0 * service_mean * service_mean + 4.0 * service_mean * gap_mean + service_second +
          gap_second) /
         (2.0 * (service_mean + gap_mean));
}

double aoi_from_gap_scov(double service_mean, double service_scov, double gap_mean,
                         double gap_scov) {
  return (service_mean * service_mean * (service_scov + 3.0) +
          gap_mean * gap_mean * (gap_scov + 1.0) + 4.0 * service_mean * gap_mean) /
         (2.0 * (service_mean + gap_mean));
}

double mgf_source_aoi(const SystemConfig& config, const Pattern& pattern, std::size_t n) {
  const PatternStats stats(pattern, config.size());
  const auto gap = gap_moments(config, pattern, stats, n);
  const auto& src = config[n];
  return aoi_from_gap(src.mean_service, src.second_moment(), gap.mean, gap.second);
}

AoiReport mgf_report(const SystemConfig& config, const Pattern& pattern) {
  const PatternStats stats(pattern, config.size());
  const SegmentMoments seg(pattern, config);

  AoiReport report;
  report.method = EvalMethod::mgf;
  for (std::size_t n = 0; n < config.size(); ++n) {
    const auto& src = config[n];
    const auto gap = gap_from(src, subpattern_mgfs(seg, stats, n));
    report.per_source_aoi.push_back(
        aoi_from_gap(src.mean_service, src.second_moment(), gap.mean, gap.second));
    report.gap_mean.push_back(gap.mean);
    report.gap_second.push_back(gap.second);
    report.gap_scov.push_back(gap.scov);
  }
  report.weighted_aoi = weighted_sum(config, report.per_source_aoi);
  return report;
}

double mgf_weighted_aoi(const SystemConfig& config, const Pattern& pattern) {
  return mgf_report(config, pattern).weighted_aoi;
}

}  // namespace aoi
