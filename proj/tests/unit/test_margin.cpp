#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "ntklab/dataset.hpp"
#include "ntklab/margin.hpp"
#include "ntklab/network.hpp"
#include "ntklab/rng.hpp"
#include "ntklab/vbar.hpp"

namespace {

using ntk::Matrix;
using ntk::Vec;
constexpr double kPi = std::numbers::pi;

Vec at_angle(double t) { return {std::cos(t), std::sin(t)}; }

// Midpoint rule over the angle of z; the integrand depends only on direction.
double circle_quadrature(const ntk::Dataset& ds, const ntk::VBarMap& map, std::size_t i,
                         std::size_t nodes) {
  double acc = 0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const Vec z = at_angle(2 * kPi * (k + 0.5) / nodes);
    if (!(ntk::dot(ds.x(i), z) > 0)) continue;
    acc += ds.labels[i] * ntk::dot(ntk::vbar_eval(map, z), ds.x(i));
  }
  return acc / nodes;
}

TEST(CircleExact, HandValues) {
  EXPECT_NEAR(ntk::margin_circle_exact(4), std::sqrt(2.0) / 4.0, 1e-15);
  EXPECT_NEAR(ntk::margin_circle_exact(8), 0.25 * (std::cos(kPi / 8) - std::cos(3 * kPi / 8)), 1e-15);
  EXPECT_NEAR(ntk::margin_circle_exact(8), 0.135299, 1e-6);
  EXPECT_THROW(ntk::margin_circle_exact(6), std::invalid_argument);
  EXPECT_THROW(ntk::margin_circle_exact(0), std::invalid_argument);
}

TEST(CircleExact, ScalesLikeInverseN) {
  for (std::size_t n = 8; n <= 256; n += 4) {
    const double ng = static_cast<double>(n) * ntk::margin_circle_exact(n);
    EXPECT_GE(ng, 0.5) << n;
    EXPECT_LE(ng, 2.0) << n;
  }
}

TEST(CircleExact, MatchesAngularQuadratureOfCircleMap) {
  for (std::size_t n : {4, 8, 12, 16}) {
    const auto ds = ntk::gen_alternating_circle(n);
    const auto map = ntk::make_circle_rz(n);
    double worst = INFINITY;
    for (std::size_t i = 0; i < n; ++i) worst = std::min(worst, circle_quadrature(ds, map, i, 400000));
    EXPECT_NEAR(worst, ntk::margin_circle_exact(n), 1e-5) << n;
  }
}

TEST(CircleMargin, MonteCarloWithinThreeStandardErrors) {
  const auto ds = ntk::gen_alternating_circle(12);
  const auto est = ntk::margin_mc(ds, ntk::make_circle_rz(12), 200000, 4);
  EXPECT_LE(std::abs(est.gamma - ntk::margin_circle_exact(12)), 3 * est.std_errors[est.argmin]);
}

TEST(CircleMargin, CircleMapAndNaturalMapAgree) {
  const auto ds = ntk::gen_alternating_circle(8);
  const auto a = ntk::margin_mc(ds, ntk::make_circle_rz(8), 100000, 1);
  const auto b = ntk::margin_mc(ds, ntk::make_natural_v0(ds), 100000, 1);
  for (std::size_t i = 0; i < 8; ++i)
    EXPECT_LE(std::abs(a.per_point[i] - b.per_point[i]), 3 * (a.std_errors[i] + b.std_errors[i]) + 1e-15);
}

TEST(CosSum, ClosedFormMatchesDirectSummation) {
  EXPECT_NEAR(ntk::cos_sum(0.7, 0.3, 1), std::cos(0.7), 1e-15);
  EXPECT_NEAR(ntk::cos_sum(0.0, kPi / 3, 6), 0.0, 1e-12);
  ntk::Rng rng(3, ntk::stream::kTrial);
  for (int t = 0; t < 200; ++t) {
    const double a = 10 * (rng.uniform() - 0.5);
    const double b = 0.05 + 3 * rng.uniform();
    const std::size_t nt = 1 + rng.below(50);
    double direct = 0;
    for (std::size_t k = 0; k < nt; ++k) direct += std::cos(a + k * b);
    EXPECT_NEAR(ntk::cos_sum(a, b, nt), direct, 1e-10);
  }
  EXPECT_THROW(ntk::cos_sum(0.0, 2 * kPi, 3), std::invalid_argument);
}

TEST(MarginMc, RadialMapOnFourSphereMatchesHalfMeanAbsCoordinate) {
  ntk::Dataset ds;
  ds.points = Matrix::from_rows({{1, 0, 0, 0}, {0, 0, 1, 0}});
  ds.labels = {1, 1};
  const auto map = ntk::make_custom_function(4, [](std::span<const double> z) {
    const double r = ntk::norm2(z);
    Vec v(z.begin(), z.end());
    for (double& c : v) c /= r;
    return v;
  });
  // E|u_1| on the unit sphere in R^d equals Gamma(d/2) / (sqrt(pi) Gamma((d+1)/2)).
  const double oracle = 0.5 * std::tgamma(2.0) / (std::sqrt(kPi) * std::tgamma(2.5));
  EXPECT_NEAR(oracle, 0.2122, 1e-4);
  const auto est = ntk::margin_mc(ds, map, 200000, 6);
  for (std::size_t i = 0; i < 2; ++i) EXPECT_LE(std::abs(est.per_point[i] - oracle), 3 * est.std_errors[i]);
}

TEST(MarginMc, OrthobasisComposedMapGivesQuarterAtDimensionFour) {
  const auto ds = ntk::gen_orthobasis(4, {1, -1, -1, 1, 1, 1, -1, -1});
  const auto est = ntk::margin_mc(ds, ntk::make_orthobasis_composed(ds), 100000, 2);
  EXPECT_LE(std::abs(est.gamma - 0.25), 3 * est.std_errors[est.argmin] + 1e-12);
}

TEST(MarginMc, RejectsTooFewSamplesAndIsDeterministic) {
  const auto ds = ntk::gen_alternating_circle(4);
  const auto map = ntk::make_circle_rz(4);
  EXPECT_THROW(ntk::margin_mc(ds, map, 99, 1), std::invalid_argument);
  EXPECT_EQ(ntk::margin_mc(ds, map, 5000, 9).per_point, ntk::margin_mc(ds, map, 5000, 9).per_point);
}

TEST(TwoPoint, ConeProbabilityBracketAndExactValue) {
  for (double b : {0.1, 0.3, 0.5}) {
    const auto rep = ntk::cone_probability_check(b, 400000, 1);
    EXPECT_NEAR(rep.exact, std::asin(b / 2) / kPi, 1e-15);
    EXPECT_GE(rep.exact, b / 7);
    EXPECT_LE(rep.exact, b / 5);
    EXPECT_LE(std::abs(rep.estimate - rep.exact), 3 * rep.se);
  }
  EXPECT_NEAR(ntk::cone_probability_check(0.3, 1000, 1).exact, 0.047927, 1e-6);
}

TEST(TwoPoint, MarginStaysBelowHalfChord) {
  for (double b : {0.1, 0.3, 0.5}) {
    const auto ds = ntk::gen_two_points(b);
    const auto est = ntk::margin_mc(ds, ntk::make_two_point_map(ds), 100000, 3);
    EXPECT_LE(est.gamma, b / 2 + 3 * est.std_errors[est.argmin]);
  }
}

TEST(UpperBound, SinglePointIsHalf) {
  ntk::Dataset ds;
  ds.points = Matrix::from_rows({{0, 1, 0}});
  ds.labels = {1};
  const auto ub = ntk::margin_upper_bound_mc(ds, {0}, 50000, 2);
  EXPECT_LE(std::abs(ub.value - 0.5), 3 * ub.se);
}

TEST(UpperBound, OddParityCubeIsExactlyZero) {
  const auto ds = ntk::gen_hypercube(3, ntk::HypercubeLabeling::parity);
  std::vector<std::size_t> all(ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i) all[i] = i;
  const auto ub = ntk::margin_upper_bound_mc(ds, all, 20000, 1);
  EXPECT_LE(ub.value, 1e-9);
  EXPECT_LE(ub.se, 1e-9);
}

TEST(UpperBound, DominatesMarginOnBuiltInInstances) {
  std::vector<std::pair<ntk::Dataset, ntk::VBarMap>> cases;
  const auto circle = ntk::gen_alternating_circle(8);
  cases.emplace_back(circle, ntk::make_circle_rz(8));
  const auto ortho = ntk::gen_orthobasis(3, {1, 1, -1, 1, -1, -1});
  cases.emplace_back(ortho, ntk::make_orthobasis_composed(ortho));
  const auto two = ntk::gen_two_points(0.3);
  cases.emplace_back(two, ntk::make_two_point_map(two));
  const auto sphere = ntk::gen_random_sphere(6, 3, ntk::LabelMode::random_signs, 5);
  cases.emplace_back(sphere, ntk::make_natural_v0(sphere));
  for (const auto& [ds, map] : cases) {
    std::vector<std::size_t> all(ds.n());
    for (std::size_t i = 0; i < ds.n(); ++i) all[i] = i;
    const auto est = ntk::margin_mc(ds, map, 50000, 7);
    const auto ub = ntk::margin_upper_bound_mc(ds, all, 50000, 8);
    EXPECT_LE(est.gamma, ub.value + 3 * std::hypot(ub.se, est.std_errors[est.argmin]));
  }
}

TEST(VBar, OutputsStayInUnitBallAndAreScaleInvariant) {
  const auto circle = ntk::gen_alternating_circle(12);
  const auto ortho = ntk::gen_orthobasis(2, {1, -1, 1, 1});
  const auto two = ntk::gen_two_points(0.4);
  const std::vector<ntk::VBarMap> maps{ntk::make_circle_rz(12), ntk::make_natural_v0(circle),
                                       ntk::make_orthobasis_composed(ortho), ntk::make_two_point_map(two),
                                       ntk::make_constant_direction({0.6, 0.8})};
  ntk::Rng rng(1, ntk::stream::kMonteCarlo);
  for (const auto& map : maps) {
    for (int s = 0; s < 20000; ++s) {
      const Vec z{rng.normal(), rng.normal()};
      const Vec v = ntk::vbar_eval(map, z);
      EXPECT_LE(ntk::norm2(v), 1 + 1e-12);
      for (double c : {0.1, 10.0}) {
        const Vec cz{c * z[0], c * z[1]};
        const Vec w = ntk::vbar_eval(map, cz);
        EXPECT_NEAR(w[0], v[0], 1e-12);
        EXPECT_NEAR(w[1], v[1], 1e-12);
      }
    }
  }
}

TEST(VBar, CircleMapSignAndGeometry) {
  const auto ds = ntk::gen_alternating_circle(12);
  const auto map = ntk::make_circle_rz(12);
  // Inside the cone of x_2, x_3 (zero-based 1, 2): positive sign since n/4 = 3 is odd.
  const auto x1 = ds.x(1), x2 = ds.x(2);
  const Vec z{x1[0] + x2[0], x1[1] + x2[1]};
  const Vec v = ntk::vbar_eval(map, z);
  const double chord = std::hypot(x1[0] - x2[0], x1[1] - x2[1]);
  EXPECT_NEAR(v[0], (ds.labels[1] * x1[0] + ds.labels[2] * x2[0]) / chord, 1e-12);
  EXPECT_NEAR(v[1], (ds.labels[1] * x1[1] + ds.labels[2] * x2[1]) / chord, 1e-12);
  EXPECT_NEAR(ntk::dot(v, z), 0.0, 1e-12);

  const auto d8 = ntk::gen_alternating_circle(8);
  const Vec z8{d8.x(0)[0] + d8.x(1)[0], d8.x(0)[1] + d8.x(1)[1]};
  EXPECT_NEAR(ntk::dot(ntk::vbar_eval(ntk::make_circle_rz(8), z8), z8), 0.0, 1e-12);

  const Vec on_point{3 * x1[0], 3 * x1[1]};
  EXPECT_EQ(ntk::vbar_eval(map, on_point), (Vec{0, 0}));
  EXPECT_THROW(ntk::vbar_eval(map, Vec{0, 0}), std::invalid_argument);
}

TEST(VBar, NaturalMapWithEmptyConeIsZero) {
  ntk::Dataset ds;
  ds.points = Matrix::from_rows({{1, 0}});
  ds.labels = {1};
  EXPECT_EQ(ntk::vbar_eval(ntk::make_natural_v0(ds), Vec{-1, 0.2}), (Vec{0, 0}));
}

TEST(Compose, ClosedFormAndGridSearch) {
  EXPECT_DOUBLE_EQ(ntk::compose_margins({0.5}), 0.5);
  for (std::size_t d = 1; d <= 16; ++d)
    EXPECT_NEAR(ntk::compose_margins(std::vector<double>(d, 0.5)), 0.5 / std::sqrt(static_cast<double>(d)), 1e-12);
  double best = 0;
  for (int k = 0; k <= 200000; ++k) {
    const double t = 0.5 * kPi * k / 200000;
    best = std::max(best, std::min(std::cos(t) * 0.3, std::sin(t) * 0.4));
  }
  EXPECT_NEAR(ntk::compose_margins({0.3, 0.4}), best, 1e-6);
  EXPECT_NEAR(best, 0.24, 1e-6);
  EXPECT_THROW(ntk::compose_margins({}), std::invalid_argument);
  EXPECT_THROW(ntk::compose_margins({0.1, 0.0}), std::invalid_argument);
}

TEST(Separator, RowsRespectBoundsAndPairsAgree) {
  const auto ds = ntk::gen_alternating_circle(8);
  const auto p = ntk::coupled_init({.m = 200, .d = 2, .beta = 1.0, .seed = 4});
  const auto sep = ntk::build_separator(p, ntk::make_circle_rz(8));
  EXPECT_NO_THROW(ntk::validate(sep));
  for (std::size_t r = 0; r < 200; r += 2)
    for (std::size_t k = 0; k < 2; ++k)
      EXPECT_EQ(p.signs[r] * sep.rows(r, k), p.signs[r + 1] * sep.rows(r + 1, k));
}

TEST(Separator, NtkMarginBruteForceAndHomogeneity) {
  ntk::Dataset ds;
  ds.points = Matrix::from_rows({{1, 0}, {0.6, 0.8}});
  ds.labels = {1, -1};
  const auto p = ntk::coupled_init({.m = 4, .d = 2, .beta = 1.0, .seed = 12});
  ntk::Separator sep;
  sep.rows = Matrix::from_rows({{0.1, 0.2}, {-0.3, 0.05}, {0.2, -0.1}, {0.0, 0.4}});
  sep.row_norm_bound = 0.5;
  const Vec got = ntk::ntk_margin_at_init(p, ds, sep);
  for (std::size_t i = 0; i < 2; ++i) {
    double expect = 0;
    for (std::size_t r = 0; r < 4; ++r)
      if (ntk::dot(p.weights.row(r), ds.x(i)) >= 0) expect += p.signs[r] * ntk::dot(sep.rows.row(r), ds.x(i)) / 2.0;
    EXPECT_NEAR(got[i], ds.labels[i] * expect, 1e-15);
  }
  sep.rows = Matrix(4, 2);
  for (double v : ntk::ntk_margin_at_init(p, ds, sep)) EXPECT_EQ(v, 0.0);
  sep.rows = p.weights;
  for (double v : ntk::ntk_margin_at_init(p, ds, sep)) EXPECT_EQ(v, 0.0);
}

TEST(Separator, InitMarginIsEmpiricalMeanOverDistinctRows) {
  const auto ds = ntk::gen_alternating_circle(8);
  const auto map = ntk::make_circle_rz(8);
  const auto p = ntk::coupled_init({.m = 64, .d = 2, .beta = 1.0, .seed = 21});
  const Vec got = ntk::ntk_margin_at_init(p, ds, ntk::build_separator(p, map));
  for (std::size_t i = 0; i < 8; ++i) {
    double mean = 0;
    for (std::size_t s = 0; s < 64; s += 2)
      if (ntk::dot(p.weights.row(s), ds.x(i)) > 0)
        mean += ds.labels[i] * ntk::dot(ntk::vbar_eval(map, p.weights.row(s)), ds.x(i));
    EXPECT_NEAR(got[i], mean / 32.0, 1e-14);
  }
}

TEST(Separator, SeedAverageMatchesMonteCarloMargin) {
  const auto ds = ntk::gen_alternating_circle(8);
  const auto map = ntk::make_circle_rz(8);
  const auto ref = ntk::margin_mc(ds, map, 400000, 1);
  const std::size_t seeds = 50;
  Vec sum(8, 0), sum_sq(8, 0);
  for (std::size_t s = 0; s < seeds; ++s) {
    const auto p = ntk::coupled_init({.m = 400, .d = 2, .beta = 1.0, .seed = 100 + s});
    const Vec v = ntk::ntk_margin_at_init(p, ds, ntk::build_separator(p, map));
    for (std::size_t i = 0; i < 8; ++i) {
      sum[i] += v[i];
      sum_sq[i] += v[i] * v[i];
    }
  }
  for (std::size_t i = 0; i < 8; ++i) {
    const double mean = sum[i] / seeds;
    const double se = std::sqrt((sum_sq[i] / seeds - mean * mean) / (seeds - 1));
    EXPECT_LE(std::abs(mean - ref.per_point[i]), 3 * std::hypot(se, ref.std_errors[i]));
  }
}

TEST(Separator2d, NetSpacingAndInvariants) {
  const auto ds = ntk::gen_alternating_circle(8);
  const double gamma = ntk::margin_circle_exact(8);
  const auto net = ntk::separator_net_angles(ds, gamma);
  const auto n_prime = std::ceil(2 * kPi / (gamma / 4));
  for (double a : net) {
    const double k = a / (2 * kPi / n_prime);
    EXPECT_NEAR(k, std::round(k), 1e-9);
  }
  EXPECT_LE(2 * kPi / n_prime, gamma / 4);
  EXPECT_EQ(net.size(), 16u);

  const std::size_t m = ntk::separator_width_2d(8, gamma, 0.1, 300.0);
  EXPECT_EQ(m % 2, 0u);
  const auto p = ntk::coupled_init({.m = m, .d = 2, .beta = 1.0, .seed = 3});
  const auto sep = ntk::build_separator_2d(p, ds, ntk::make_circle_rz(8), gamma);
  EXPECT_NO_THROW(ntk::validate(sep));
  const auto p3 = ntk::coupled_init({.m = 4, .d = 3, .beta = 1.0, .seed = 3});
  EXPECT_THROW(ntk::build_separator_2d(p3, ds, ntk::make_circle_rz(8), gamma), std::invalid_argument);
}

TEST(Separator2d, AllRowsInOneConeAreClamped) {
  const auto ds = ntk::gen_alternating_circle(8);
  const double gamma = ntk::margin_circle_exact(8);
  ntk::NetParams p;
  p.weights = Matrix(4, 2);
  for (std::size_t r = 0; r < 4; ++r) {
    p.weights(r, 0) = 1.0;
    p.weights(r, 1) = 0.01;
  }
  p.signs = {1, -1, 1, -1};
  const auto sep = ntk::build_separator_2d(p, ds, ntk::make_circle_rz(8), gamma);
  EXPECT_GT(sep.empty_cones, 0u);
  EXPECT_NO_THROW(ntk::validate(sep));
}

TEST(SeparatorWidth, Arithmetic) {
  EXPECT_EQ(ntk::separator_width(8, 0.1, 0.1), 2 * static_cast<std::size_t>(std::ceil(800 * std::log(160.0))));
  EXPECT_EQ(ntk::separator_width_2d(8, 0.5, 0.1, 3.0), 28u);
  EXPECT_THROW(ntk::separator_width(8, 0.0, 0.1), std::invalid_argument);
}

}  // namespace
