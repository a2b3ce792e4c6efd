#include <gtest/gtest.h>

#include <cmath>

#include "ntklab/rng.hpp"

namespace {

TEST(Rng, SameCounterSameSequence) {
  ntk::Rng a(42, ntk::stream::kInit, 3);
  ntk::Rng b(42, ntk::stream::kInit, 3);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(a.normal(), b.normal());
}

TEST(Rng, StreamsDiffer) {
  ntk::Rng a(42, ntk::stream::kInit, 0);
  ntk::Rng b(42, ntk::stream::kInit, 1);
  ntk::Rng c(42, ntk::stream::kDataset, 0);
  EXPECT_NE(a.normal(), b.normal());
  EXPECT_NE(ntk::derive_key(42, 1, 0), ntk::derive_key(42, 2, 0));
  (void)c;
}

TEST(Rng, NormalMomentsWithinFiveStandardErrors) {
  ntk::Rng rng(7, ntk::stream::kMonteCarlo);
  const int N = 200000;
  double s = 0, s2 = 0;
  for (int k = 0; k < N; ++k) {
    const double v = rng.normal();
    s += v;
    s2 += v * v;
  }
  EXPECT_NEAR(s / N, 0.0, 5.0 / std::sqrt(N));
  EXPECT_NEAR(s2 / N, 1.0, 5.0 * std::sqrt(2.0 / N));
}

TEST(Rng, BelowStaysInRange) {
  ntk::Rng rng(1, ntk::stream::kCoupon);
  for (int k = 0; k < 1000; ++k) EXPECT_LT(rng.below(7), 7u);
}

}  // namespace
