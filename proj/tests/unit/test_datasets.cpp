#include <gtest/gtest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "ntklab/dataset.hpp"
#include "ntklab/rng.hpp"
#include "ntklab/vbar.hpp"

namespace {

using ntk::Dataset;

TEST(AlternatingCircle, TwelvePointsMatchTrigFormula) {
  const Dataset ds = ntk::gen_alternating_circle(12);
  EXPECT_EQ(ds.n(), 12u);
  EXPECT_EQ(ds.d(), 2u);
  EXPECT_NEAR(ds.points(0, 0), 1.0, 1e-15);
  EXPECT_NEAR(ds.points(0, 1), 0.0, 1e-15);
  EXPECT_EQ(ds.labels[0], 1.0);
  EXPECT_NEAR(ds.points(3, 0), 0.0, 1e-15);
  EXPECT_NEAR(ds.points(3, 1), 1.0, 1e-15);
  EXPECT_EQ(ds.labels[3], -1.0);
}

TEST(AlternatingCircle, FourPointsAreTheAxes) {
  const Dataset ds = ntk::gen_alternating_circle(4);
  const double expect[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(ds.points(k, 0), expect[k][0], 1e-15);
    EXPECT_NEAR(ds.points(k, 1), expect[k][1], 1e-15);
    EXPECT_EQ(ds.labels[k], k % 2 == 0 ? 1.0 : -1.0);
  }
}

TEST(AlternatingCircle, AdjacentDotProductAtEightPoints) {
  const Dataset ds = ntk::gen_alternating_circle(8);
  for (std::size_t k = 0; k < 8; ++k)
    EXPECT_NEAR(ntk::dot(ds.x(k), ds.x((k + 1) % 8)), std::sqrt(2.0) / 2.0, 1e-12);
}

TEST(AlternatingCircle, ReflectionPreservesPointsAndLabels) {
  for (std::size_t n : {4u, 8u, 12u, 64u}) {
    const Dataset ds = ntk::gen_alternating_circle(n);
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t j = (n - k) % n;
      // Reflection across the x axis maps x_k to x_{n-k}.
      EXPECT_NEAR(ds.points(k, 0), ds.points(j, 0), 1e-12);
      EXPECT_NEAR(ds.points(k, 1), -ds.points(j, 1), 1e-12);
      EXPECT_EQ(ds.labels[k], ds.labels[j]);
    }
  }
}

TEST(AlternatingCircle, RejectsBadSize) {
  EXPECT_THROW(ntk::gen_alternating_circle(6), std::invalid_argument);
  EXPECT_THROW(ntk::gen_alternating_circle(0), std::invalid_argument);
}

TEST(Orthobasis, TwoDimensionalPoints) {
  const Dataset ds = ntk::gen_orthobasis(2, {1, 1, 1, 1});
  const double expect[4][2] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
  for (int k = 0; k < 4; ++k) {
    EXPECT_EQ(ds.points(k, 0), expect[k][0]);
    EXPECT_EQ(ds.points(k, 1), expect[k][1]);
  }
}

TEST(Orthobasis, PairwiseDotsAreZeroOrMinusOne) {
  const Dataset ds = ntk::gen_orthobasis(4, ntk::Vec(8, 1.0));
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = i + 1; j < 8; ++j) {
      const double v = ntk::dot(ds.x(i), ds.x(j));
      EXPECT_TRUE(v == 0.0 || v == -1.0);
    }
}

TEST(Orthobasis, MixedLabelsValidateAndBadLengthsThrow) {
  EXPECT_NO_THROW(ntk::gen_orthobasis(3, {1, -1, 1, -1, -1, 1}));
  EXPECT_THROW(ntk::gen_orthobasis(3, {}), std::invalid_argument);
  EXPECT_THROW(ntk::gen_orthobasis(3, {1, 1}), std::invalid_argument);
  EXPECT_THROW(ntk::gen_orthobasis(2, {1, 1, 0.5, 1}), std::invalid_argument);
}

TEST(Hypercube, ParityOfAllNegativeCornerInTwoDimensions) {
  const Dataset ds = ntk::gen_hypercube(2, ntk::HypercubeLabeling::parity);
  bool found = false;
  for (std::size_t i = 0; i < ds.n(); ++i) {
    if (ds.points(i, 0) < 0 && ds.points(i, 1) < 0) {
      EXPECT_NEAR(ds.points(i, 0), -1.0 / std::sqrt(2.0), 1e-15);
      EXPECT_EQ(ds.labels[i], 1.0);
      found = true;
    }
  }
  EXPECT_TRUE(found);
}

TEST(Hypercube, MajorityDropsTies) {
  const Dataset ds = ntk::gen_hypercube(2, ntk::HypercubeLabeling::majority);
  EXPECT_EQ(ds.n(), 2u);
  for (std::size_t i = 0; i < ds.n(); ++i) {
    const std::size_t sigma = ntk::negative_count(ds.x(i));
    EXPECT_EQ(ds.labels[i], sigma > 1 ? -1.0 : 1.0);
  }
  // Odd d keeps everything.
  EXPECT_EQ(ntk::gen_hypercube(5, ntk::HypercubeLabeling::majority).n(), 32u);
}

TEST(Hypercube, ParityLabelsSumToZero) {
  for (std::size_t d = 2; d <= 10; ++d) {
    const Dataset ds = ntk::gen_hypercube(d, ntk::HypercubeLabeling::parity);
    double s = 0;
    for (double y : ds.labels) s += y;
    EXPECT_EQ(s, 0.0);
    EXPECT_EQ(ds.n(), std::size_t{1} << d);
  }
}

TEST(Hypercube, CapIsEnforced) {
  EXPECT_THROW(ntk::gen_hypercube(17, ntk::HypercubeLabeling::parity), std::invalid_argument);
  EXPECT_THROW(ntk::gen_hypercube(5, ntk::HypercubeLabeling::parity, 16), std::invalid_argument);
  EXPECT_THROW(ntk::gen_hypercube(1, ntk::HypercubeLabeling::parity), std::invalid_argument);
}

TEST(Hypercube, OddParityConeSumsCancel) {
  const Dataset ds = ntk::gen_hypercube(3, ntk::HypercubeLabeling::parity);
  ntk::Rng rng(5, ntk::stream::kMonteCarlo);
  ntk::Vec z(3);
  for (int s = 0; s < 100000; ++s) {
    rng.fill_normal(z);
    for (double v : ntk::cone_sum(ds, z)) ASSERT_NEAR(v, 0.0, 1e-9);
  }
}

TEST(TwoPoints, ChordAndInnerProduct) {
  const Dataset ds = ntk::gen_two_points(1.0);
  EXPECT_NEAR(ntk::dot(ds.x(0), ds.x(1)), 0.5, 1e-12);
  const Dataset small = ntk::gen_two_points(0.3);
  EXPECT_NEAR(std::hypot(small.points(0, 0) - small.points(1, 0), small.points(0, 1) - small.points(1, 1)), 0.3,
              1e-12);
  EXPECT_EQ(small.labels[0], 1.0);
  EXPECT_EQ(small.labels[1], -1.0);
  const Dataset tiny = ntk::gen_two_points(1e-9);
  EXPECT_NEAR(tiny.points(1, 0), 1.0, 1e-12);
}

TEST(TwoPoints, RejectsOutOfRangeChord) {
  EXPECT_THROW(ntk::gen_two_points(0.0), std::invalid_argument);
  EXPECT_THROW(ntk::gen_two_points(1.5), std::invalid_argument);
  EXPECT_THROW(ntk::gen_two_points(-0.1), std::invalid_argument);
}

TEST(RandomSphere, DeterministicGivenSeed) {
  const auto a = ntk::gen_random_sphere(20, 5, ntk::LabelMode::random_signs, 11);
  const auto b = ntk::gen_random_sphere(20, 5, ntk::LabelMode::random_signs, 11);
  EXPECT_EQ(a.points, b.points);
  EXPECT_EQ(a.labels, b.labels);
  const auto c = ntk::gen_random_sphere(20, 5, ntk::LabelMode::random_signs, 12);
  EXPECT_NE(a.points, c.points);
}

TEST(RandomSphere, MeanPairwiseDotIsCentered) {
  const auto ds = ntk::gen_random_sphere(1000, 8, ntk::LabelMode::random_signs, 3);
  double s = 0, s2 = 0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < ds.n(); ++i)
    for (std::size_t j = i + 1; j < ds.n(); ++j) {
      const double v = ntk::dot(ds.x(i), ds.x(j));
      s += v;
      s2 += v * v;
      ++cnt;
    }
  const double mean = s / cnt;
  // Distinct pairs are uncorrelated for rotation-invariant points.
  const double var = s2 / cnt - mean * mean;
  const double se = std::sqrt(var / cnt);
  EXPECT_LT(std::abs(mean), 3.0 * se);
}

TEST(RandomSphere, LabelModes) {
  const auto one = ntk::gen_random_sphere(30, 3, ntk::LabelMode::constant_one, 1);
  for (double y : one.labels) EXPECT_EQ(y, 1.0);
  const auto reg = ntk::gen_random_sphere(30, 3, ntk::LabelMode::regression_uniform, 1);
  EXPECT_EQ(reg.kind, ntk::DatasetKind::regression);
  for (double y : reg.labels) EXPECT_LE(std::abs(y), 1.0);
}

TEST(Dataset, GeneratorsPassValidation) {
  EXPECT_NO_THROW(ntk::validate(ntk::gen_alternating_circle(256)));
  EXPECT_NO_THROW(ntk::validate(ntk::gen_hypercube(7, ntk::HypercubeLabeling::majority)));
  EXPECT_NO_THROW(ntk::validate(ntk::gen_random_sphere(50, 50, ntk::LabelMode::regression_uniform, 9)));
}

TEST(Dataset, ValidationRejectsBrokenInvariants) {
  Dataset ds = ntk::gen_alternating_circle(4);
  ds.points(0, 0) = 1.1;
  EXPECT_THROW(ntk::validate(ds), std::invalid_argument);
  ds = ntk::gen_alternating_circle(4);
  ds.labels[0] = 0.5;
  EXPECT_THROW(ntk::validate(ds), std::invalid_argument);
  ds.kind = ntk::DatasetKind::regression;
  EXPECT_NO_THROW(ntk::validate(ds));
  ds.labels[0] = 1.5;
  EXPECT_THROW(ntk::validate(ds), std::invalid_argument);
}

TEST(Dataset, JsonRoundTrip) {
  const auto ds = ntk::gen_random_sphere(7, 4, ntk::LabelMode::regression_uniform, 21);
  const nlohmann::json j = nlohmann::json::parse(ntk::dataset_to_json(ds).dump());
  EXPECT_EQ(j.at("d"), 4);
  EXPECT_EQ(j.at("kind"), "regression");
  const auto back = ntk::dataset_from_json(j);
  EXPECT_EQ(back.points, ds.points);
  EXPECT_EQ(back.labels, ds.labels);
}

}  // namespace
