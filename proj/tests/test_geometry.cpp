#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "dnwave/error.hpp"
#include "dnwave/geometry.hpp"

using namespace dnwave;

TEST(CcDistance, Examples) {
  EXPECT_DOUBLE_EQ(cc_distance({0, 0}, {1, 0}), 1.0);
  EXPECT_DOUBLE_EQ(cc_distance({0, 1}, {0, 0}), 0.5);
  EXPECT_DOUBLE_EQ(cc_distance({0.3, 2.0}, {0.3, 2.0}), 0.0);
  // the minimal image is used tangentially
  EXPECT_NEAR(cc_distance_periodic({0.1, 0}, {9.9, 0}, 10.0), cc_distance({0, 0}, {0.2, 0}), 1e-15);
}

TEST(CcDistance, SymmetricAndQuasiTriangle) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> t(-3.0, 3.0);
  std::uniform_real_distribution<double> n(0.0, 3.0);
  double worst = 0.0;
  for (int k = 0; k < 100000; ++k) {
    const Point a{t(rng), n(rng)}, b{t(rng), n(rng)}, c{t(rng), n(rng)};
    ASSERT_DOUBLE_EQ(cc_distance(a, b), cc_distance(b, a));
    const double rhs = cc_distance(a, b) + cc_distance(b, c);
    if (rhs > 0.0) worst = std::max(worst, cc_distance(a, c) / rhs);
  }
  EXPECT_LE(worst, 4.0);
}

TEST(CcBall, DegenerateScalingAtTheBoundary) {
  const auto g = HalfSpaceGrid::two_d(1.0, 800, 2.0, 800);
  // d(lambda^2 z) = lambda d(z) about a boundary point: |B_2r| = 16 |B_r| in 2D
  const double big = cc_ball(g, {1.0, 0.0}, 0.4).volume;
  const double small = cc_ball(g, {1.0, 0.0}, 0.2).volume;
  EXPECT_NEAR(big / small, 16.0, 1.6);
  // away from the boundary the ball is nearly Euclidean
  const auto gi = HalfSpaceGrid::two_d(3.0, 300, 1.0, 100);
  const double b1 = cc_ball(gi, {0.5, 2.0}, 0.02).volume;
  const double b2 = cc_ball(gi, {0.5, 2.0}, 0.04).volume;
  EXPECT_NEAR(b2 / b1, 4.0, 0.6);
}

TEST(CcBall, LargeRadiusCoversGridAndTinyRadiusThrows) {
  const auto g = HalfSpaceGrid::two_d(2.0, 16, 2.0, 8);
  const auto b = cc_ball(g, {1.0, 1.0}, 100.0);
  EXPECT_EQ(b.cells.size(), g.size());
  EXPECT_DOUBLE_EQ(b.volume, 4.0);
  EXPECT_THROW(cc_ball(g, {1.0, 1.0}, 1e-6), GridError);
  EXPECT_TRUE(cc_ball_or_empty(g, {1.0, 1.0}, 1e-6).cells.empty());
}

TEST(Lipschitz, LinearFields) {
  const auto g = HalfSpaceGrid::two_d(2.0, 16, 2.0, 8);
  const auto w = ScalarField::from_function(g, [](double t, double z) { return 3 * t + 4 * z; });
  // the tangential difference wraps across the period, so use a periodic field instead
  const auto p = ScalarField::from_function(g, [](double, double z) { return 4 * z - 1; });
  EXPECT_NEAR(lipschitz_seminorm(p), 4.0, 1e-12);
  EXPECT_GT(lipschitz_seminorm(w), 4.0);
  FieldSequence s;
  s.push_back(p);
  s.push_back(ScalarField::from_function(g, [](double, double z) { return -7 * z; }, 1.0));
  EXPECT_NEAR(lipschitz_seminorm(s), 7.0, 1e-12);
}

TEST(QuasiIsometry, IdentityAndStretch) {
  const auto g = HalfSpaceGrid::two_d(2.0, 16, 2 * M_PI, 8);
  const auto id = ScalarField::from_function(g, [](double, double x) { return x; });
  const auto r = quasi_isometry_ratio(id, 2000, 3);
  EXPECT_DOUBLE_EQ(r.min_ratio, 1.0);
  EXPECT_DOUBLE_EQ(r.max_ratio, 1.0);

  const double a = 0.3;
  const auto st = ScalarField::from_function(g, [&](double, double x) { return (1 + a) * x; });
  const auto normal = quasi_isometry_ratio(st, {{g.index(2, 1), g.index(2, 9)}, {g.index(5, 0), g.index(5, 15)}});
  EXPECT_NEAR(normal.min_ratio, 1 + a, 1e-12);
  EXPECT_NEAR(normal.max_ratio, 1 + a, 1e-12);
}

TEST(QuasiIsometry, SmallPerturbationStaysNearOne) {
  const auto g = HalfSpaceGrid::two_d(6.0, 48, 2 * M_PI, 32);
  const auto z = ScalarField::from_function(g, [](double t, double x) {
    return x + 0.05 * std::sin(t) * x * std::exp(-x);
  });
  const auto r = quasi_isometry_ratio(z, 100000, 42);
  EXPECT_GE(r.min_ratio, 0.85);
  EXPECT_LE(r.max_ratio, 1.15);
}
