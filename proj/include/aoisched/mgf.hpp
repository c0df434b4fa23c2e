#pragma once

// Weighted-AoI evaluation through second-order truncated moment generating
// functions. Scales to thousands of sources; SAMS and IS score every
// candidate pattern with it.

#include <span>

#include "aoisched/core.hpp"

namespace aoi {

/// G(s) = m0 + m1 s + m2 s^2 + O(s^3).
///
/// A proper MGF of a variable X has m0 = 1, m1 = E[X], m2 = E[X^2] / 2.
/// Scaled series (m0 != 1) show up inside the gap-MGF numerator and
/// denominator, so arithmetic is defined on the general truncated series.
struct Mgf2 {
  double m0 = 1.0;
  double m1 = 0.0;
  double m2 = 0.0;

  static Mgf2 from_moments(double mean, double second) { return {1.0, mean, 0.5 * second}; }

  double mean() const { return m1; }
  double second_moment() const { return 2.0 * m2; }

  friend Mgf2 operator*(const Mgf2& a, const Mgf2& b) {
    return {a.m0 * b.m0, a.m0 * b.m1 + a.m1 * b.m0, a.m0 * b.m2 + a.m1 * b.m1 + a.m2 * b.m0};
  }
  friend Mgf2 operator*(double k, const Mgf2& a) { return {k * a.m0, k * a.m1, k * a.m2}; }
  friend Mgf2 operator+(const Mgf2& a, const Mgf2& b) {
    return {a.m0 + b.m0, a.m1 + b.m1, a.m2 + b.m2};
  }
  friend Mgf2 operator-(const Mgf2& a, const Mgf2& b) {
    return {a.m0 - b.m0, a.m1 - b.m1, a.m2 - b.m2};
  }
  Mgf2& operator*=(const Mgf2& b) { return *this = *this * b; }
  Mgf2& operator+=(const Mgf2& b) { return *this = *this + b; }
};

/// MGF of a sum of independent variables, term i repeated multiplicities[i]
/// times. Accumulates means and variances, which is the second-order
/// truncation of the product without squaring large means.
Mgf2 mgf_product(std::span<const Mgf2> terms, std::span<const std::size_t> multiplicities);

/// Order <= 2 series coefficients of the numerator and denominator of the
/// gap MGF conditioned on a success at appearance k:
///   numerator   = (1 - p^alpha) + a s + b s^2
///   denominator = (1 - p^alpha) + c s + d s^2
struct GapMgfCoeffs {
  double constant = 1.0;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;

  double first_derivative() const { return (a - c) / constant; }
  double second_derivative() const {
    return 2.0 * (b - d) / constant + 2.0 * c * (c - a) / (constant * constant);
  }
};

/// Moments of the gap between the end of a successful source-n transmission
/// and the start of the next one.
struct GapMoments {
  double mean = 0.0;    // s~_n
  double second = 0.0;  // q~_n
  double scov = 0.0;    // c~_n
};

std::vector<GapMgfCoeffs> gap_mgf_coeffs(const SystemConfig& config, const Pattern& pattern,
                                         const PatternStats& stats, std::size_t n);

GapMoments gap_moments(const SystemConfig& config, const Pattern& pattern,
                       const PatternStats& stats, std::size_t n);

/// Renewal-reward mean AoI from the service and gap moments.
double aoi_from_gap(double service_mean, double service_second, double gap_mean,
                    double gap_second);

/// Same quantity written in terms of squared coefficients of variation.
double aoi_from_gap_scov(double service_mean, double service_scov, double gap_mean,
                         double gap_scov);

double mgf_source_aoi(const SystemConfig& config, const Pattern& pattern, std::size_t n);

/// Per-source AoI, gap moments and the weighted total.
AoiReport mgf_report(const SystemConfig& config, const Pattern& pattern);

/// Weighted AoI only; the hot path of the pattern searches.
double mgf_weighted_aoi(const SystemConfig& config, const Pattern& pattern);

}  // namespace aoi
