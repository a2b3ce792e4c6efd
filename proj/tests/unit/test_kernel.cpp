#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "ntklab/dataset.hpp"
#include "ntklab/kernel.hpp"
#include "ntklab/network.hpp"
#include "ntklab/rng.hpp"

namespace {

using ntk::Matrix;

double eigen_min(const Matrix& a) {
  Eigen::MatrixXd e(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) e(i, j) = a(i, j);
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(e).eigenvalues()(0);
}

// Direct double loop, independent of the bit-packed implementation.
Matrix naive_dis(const ntk::Dataset& ds, const Matrix& w) {
  Matrix h(ds.n(), ds.n());
  for (std::size_t i = 0; i < ds.n(); ++i)
    for (std::size_t j = 0; j < ds.n(); ++j) {
      double c = 0;
      for (std::size_t r = 0; r < w.rows(); ++r)
        c += (ntk::dot(w.row(r), ds.x(i)) >= 0 && ntk::dot(w.row(r), ds.x(j)) >= 0);
      h(i, j) = ntk::dot(ds.x(i), ds.x(j)) * c / static_cast<double>(w.rows());
    }
  return h;
}

TEST(HCts, DiagonalIsHalfAndAntipodalIsZero) {
  ntk::Dataset ds;
  ds.points = Matrix::from_rows({{1, 0}, {-1, 0}, {0, 1}});
  ds.labels = {1, -1, 1};
  const auto k = ntk::h_cts(ds);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(k.entries(i, i), 0.5);
  EXPECT_NEAR(k.entries(0, 1), 0.0, 1e-16);
  EXPECT_EQ(k.entries(0, 2), 0.0);
}

TEST(HCts, SixtyDegreeEntry) {
  ntk::Dataset ds;
  ds.points = Matrix::from_rows({{1, 0}, {0.5, std::sqrt(3.0) / 2}});
  ds.labels = {1, 1};
  // 0.5 * (pi - pi/3) / (2 pi) = 1/6
  EXPECT_NEAR(ntk::h_cts(ds).entries(0, 1), 1.0 / 6.0, 1e-15);
}

TEST(HCts, MonteCarloAgreesWithinFourStandardErrors) {
  const auto ds = ntk::gen_random_sphere(6, 4, ntk::LabelMode::random_signs, 11);
  const auto exact = ntk::h_cts(ds);
  const auto mc = ntk::h_cts_mc(ds, 200000, 5);
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) {
      const double se = std::max(mc.std_errors(i, j), 1e-12);
      EXPECT_LE(std::abs(mc.entries(i, j) - exact.entries(i, j)), 4 * se) << i << "," << j;
    }
}

TEST(HCts, OrthobasisIsHalfIdentityBlockStructure) {
  const auto ds = ntk::gen_orthobasis(3, {1, -1, 1, 1, -1, 1});
  const auto k = ntk::h_cts(ds);
  // e_j vs -e_j: inner product -1 and angle pi, so zero; distinct axes are orthogonal.
  for (std::size_t i = 0; i < 6; ++i)
    for (std::size_t j = 0; j < 6; ++j) EXPECT_NEAR(k.entries(i, j), i == j ? 0.5 : 0.0, 1e-15);
}

TEST(HDis, MatchesNaiveLoopAndIsPairDuplicationInvariant) {
  const auto ds = ntk::gen_random_sphere(9, 3, ntk::LabelMode::random_signs, 3);
  const auto p = ntk::coupled_init({.m = 40, .d = 3, .beta = 1.0, .seed = 7});
  const auto k = ntk::h_dis(ds, p.weights);
  EXPECT_LE(ntk::frobenius_distance(k.entries, naive_dis(ds, p.weights)), 1e-14);
  Matrix half(20, 3);
  for (std::size_t r = 0; r < 20; ++r)
    for (std::size_t c = 0; c < 3; ++c) half(r, c) = p.weights(2 * r, c);
  EXPECT_LE(ntk::frobenius_distance(k.entries, ntk::h_dis(ds, half).entries), 1e-15);
}

TEST(HDis, ScaleInvariantInWeights) {
  const auto ds = ntk::gen_random_sphere(5, 4, ntk::LabelMode::random_signs, 1);
  const auto p = ntk::coupled_init({.m = 30, .d = 4, .beta = 1.0, .seed = 2});
  Matrix big = p.weights;
  for (double& v : big.data()) v *= 1e3;
  EXPECT_EQ(ntk::h_dis(ds, p.weights).entries, ntk::h_dis(ds, big).entries);
}

TEST(HDis, EntriesBoundedByHalfOfGramOnAverage) {
  const auto ds = ntk::gen_random_sphere(8, 5, ntk::LabelMode::random_signs, 9);
  const auto p = ntk::coupled_init({.m = 100, .d = 5, .beta = 1.0, .seed = 4});
  const auto k = ntk::h_dis(ds, p.weights);
  for (std::size_t i = 0; i < 8; ++i)
    for (std::size_t j = 0; j < 8; ++j) EXPECT_LE(std::abs(k.entries(i, j)), std::abs(ntk::dot(ds.x(i), ds.x(j))) + 1e-15);
}

TEST(HTPerp, LimitsInRadius) {
  const auto ds = ntk::gen_random_sphere(7, 3, ntk::LabelMode::random_signs, 2);
  const auto p0 = ntk::coupled_init({.m = 24, .d = 3, .beta = 1.0, .seed = 5});
  auto pt = p0;
  ntk::Rng rng(1, ntk::stream::kPerturb);
  for (double& v : pt.weights.data()) v += 0.1 * rng.normal();
  const auto zero = ntk::h_t_perp(p0, pt, ds, 0.0);
  for (double v : zero.entries.data()) EXPECT_EQ(v, 0.0);
  const auto all = ntk::h_t_perp(p0, pt, ds, INFINITY);
  EXPECT_EQ(all.entries, ntk::h_t(pt, ds).entries);
}

TEST(HTPerp, RowSumsOfCountsMatchFlipSetSizes) {
  const auto ds = ntk::gen_random_sphere(5, 2, ntk::LabelMode::random_signs, 6);
  const auto p0 = ntk::coupled_init({.m = 50, .d = 2, .beta = 1.0, .seed = 8});
  const double R = 0.4;
  const auto perp = ntk::h_t_perp(p0, p0, ds, R);
  const auto sizes = ntk::flip_set_sizes(p0.weights, ds, R);
  for (std::size_t i = 0; i < 5; ++i) {
    std::size_t firing_perp = 0;
    for (std::size_t r = 0; r < 50; ++r) {
      const double v = ntk::dot(p0.weights.row(r), ds.x(i));
      firing_perp += v >= 0 && std::abs(v) < R;
    }
    EXPECT_NEAR(perp.entries(i, i) * 50.0, static_cast<double>(firing_perp), 1e-12);
    EXPECT_LE(firing_perp, sizes[i]);
  }
}

TEST(MinEig, MatchesEigenAndCaches) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto ds = ntk::gen_random_sphere(12, 5, ntk::LabelMode::random_signs, seed);
    auto k = ntk::h_cts(ds);
    const double ours = ntk::min_eig(k);
    EXPECT_NEAR(ours, eigen_min(k.entries), 1e-10);
    ASSERT_TRUE(k.min_eig_cache.has_value());
    EXPECT_EQ(*k.min_eig_cache, ours);
  }
}

TEST(MinEig, CtsKernelIsPositiveDefiniteOnDistinctNonAntipodalPoints) {
  const auto ds = ntk::gen_random_sphere(10, 4, ntk::LabelMode::random_signs, 3);
  EXPECT_GT(ntk::min_eig(ntk::h_cts(ds)), 0.0);
}

TEST(Concentration, LargeWidthPassesEveryTrial) {
  const auto ds = ntk::gen_random_sphere(6, 4, ntk::LabelMode::random_signs, 1);
  const auto rep = ntk::concentration_check(ds, 20000, 2, 5, 3);
  EXPECT_GT(rep.lambda, 0.0);
  EXPECT_EQ(rep.pass_rate, 1.0);
  EXPECT_DOUBLE_EQ(rep.bound, rep.lambda / 4.0);
}

TEST(Concentration, RepetitionDoesNotChangeKernel) {
  const auto ds = ntk::gen_random_sphere(5, 3, ntk::LabelMode::random_signs, 2);
  const auto a = ntk::concentration_check(ds, 300, 1, 3, 9);
  const auto b = ntk::concentration_check(ds, 300, 4, 3, 9);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_NEAR(a.frobenius_errors[t], b.frobenius_errors[t], 1e-14);
}

TEST(Concentration, ErrorShrinksLikeInverseSqrtWidth) {
  const auto ds = ntk::gen_random_sphere(6, 3, ntk::LabelMode::random_signs, 4);
  std::vector<double> ms, errs;
  for (std::size_t m0 : {100, 400, 1600, 6400}) {
    const auto rep = ntk::concentration_check(ds, m0, 1, 40, 17);
    ms.push_back(static_cast<double>(m0));
    errs.push_back(rep.mean_frobenius_error);
  }
  EXPECT_NEAR(ntk::loglog_slope(ms, errs), -0.5, 0.1);
}

TEST(Perturbation, ZeroRadiusLeavesKernelUnchanged) {
  const auto ds = ntk::gen_random_sphere(6, 3, ntk::LabelMode::random_signs, 2);
  const auto rep = ntk::perturbation_check(ds, 0.0, 64, 5, 1);
  for (double d : rep.distances) EXPECT_EQ(d, 0.0);
  EXPECT_EQ(rep.pass_rate, 1.0);
}

TEST(Perturbation, SmallRadiusStaysInsideBound) {
  const auto ds = ntk::gen_random_sphere(6, 3, ntk::LabelMode::random_signs, 2);
  const auto rep = ntk::perturbation_check(ds, 0.05, 4000, 10, 1);
  EXPECT_GE(rep.pass_rate, 0.9);
  EXPECT_THROW(ntk::perturbation_check(ds, -1.0, 4, 1, 1), std::invalid_argument);
}

TEST(LogLogSlope, ExactPowerLaw) {
  std::vector<double> x{1, 2, 4, 8, 16}, y;
  for (double v : x) y.push_back(3.0 * std::pow(v, -1.5));
  EXPECT_NEAR(ntk::loglog_slope(x, y), -1.5, 1e-12);
}

}  // namespace
