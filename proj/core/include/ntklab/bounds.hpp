#pragma once

#include <cstdint>
#include <vector>

#include "ntklab/dataset.hpp"
#include "ntklab/margin.hpp"
#include "ntklab/network.hpp"

namespace ntk {

struct SegmentReport {
  std::size_t breakpoint_count = 0;
  std::size_t segment_count = 0;
  /// Misclassified among the l1-projected points x_i / ||x_i||_1.
  std::size_t misclassified = 0;
  /// Misclassified among the original points.
  std::size_t misclassified_original = 0;
  std::size_t bound_2m_plus_4 = 0;
};

/// Breakpoints and linear pieces of the network restricted to the l1 unit
/// sphere in the plane.
SegmentReport count_segments(const NetParams& params, const Dataset& ds);

struct CoverageReport {
  /// One entry per quadruple start i = 0, 4, 8, ...
  std::vector<bool> quadruple_hit;
  std::size_t trials = 1;
  double uncovered_rate = 0.0;
};

/// Whether direction angle phi lies in the region Z_i of quadruple
/// (x_i, ..., x_{i+3}) on the n-point circle: two half-open arcs of three
/// point spacings starting at theta_i + pi/2 and theta_i - pi/2.
bool in_quadruple_region(std::size_t i, std::size_t n, double phi);

/// Direct check of the all-equal event: true iff 1[<x_k, w> > 0] agrees for
/// k = i..i+3.
bool quadruple_all_equal(std::size_t i, std::size_t n, std::span<const double> w);

/// Single weight set; uncovered_rate is the fraction of quadruples no row breaks.
CoverageReport quadruple_coverage(const Matrix& weights, std::size_t n);

/// Fraction of trials in which m Gaussian rows leave some quadruple unbroken.
CoverageReport coverage_sim(std::size_t n, std::size_t m, std::size_t trials, std::uint64_t seed);

/// Monte-Carlo estimate of Pr[z in Z_0] for Gaussian z.
McValue quadruple_region_probability(std::size_t n, std::size_t samples, std::uint64_t seed);

/// Fraction of trials where m uniform draws over n_prime coupons miss one.
double coupon_collector_sim(std::size_t n_prime, std::size_t m, std::size_t trials,
                            std::uint64_t seed);
/// min(1, n' (1 - 1/n')^m).
double coupon_union_bound(std::size_t n_prime, std::size_t m);

struct FailureSimReport {
  double failure_rate = 0.0;
  double se = 0.0;
  std::size_t trials = 0;
  std::size_t m_prime = 0;
  std::size_t point = 0;
};

/// Fraction of fresh coupled initializations (width 2 m') for which the
/// natural separator gives y_0 f_0^(0)(U) <= 0 on the n-point circle.
FailureSimReport empirical_mean_failure_sim(std::size_t n, std::size_t m_prime, std::size_t trials,
                                            std::uint64_t seed);

/// Pr[|<vbar(z), x_0> 1[<z, x_0> > 0]| >= 1/sqrt 2] under the circle map.
McValue large_term_probability(std::size_t n, std::size_t samples, std::uint64_t seed);

}  // namespace ntk
