#include <cmath>

#include <gtest/gtest.h>

#include "dnwave/error.hpp"
#include "dnwave/grid.hpp"

using namespace dnwave;

namespace {

double max_diff(const ScalarField& f, const std::function<double(double, double)>& exact) {
  const auto& g = f.grid();
  double e = 0.0;
  for (int j = 0; j < g.n_tangential(); ++j) {
    for (int i = 0; i < g.n_normal(); ++i) {
      e = std::max(e, std::abs(f(j, i) - exact(g.tangential_center(j), g.normal_center(i))));
    }
  }
  return e;
}

}  // namespace

TEST(Grid, CentresInsideSlab) {
  const auto g = HalfSpaceGrid::two_d(2.0, 8, 1.0, 4);
  EXPECT_DOUBLE_EQ(g.h_normal(), 0.25);
  EXPECT_DOUBLE_EQ(g.normal_center(0), 0.125);
  EXPECT_DOUBLE_EQ(g.normal_center(7), 1.875);
  EXPECT_DOUBLE_EQ(g.tangential_center(0), 0.125);
  EXPECT_EQ(g.wrap(-1), 3);
  EXPECT_EQ(g.wrap(4), 0);
  EXPECT_EQ(g.size(), 32u);
  EXPECT_THROW(HalfSpaceGrid::one_d(0.0, 4), GridError);
  EXPECT_THROW(HalfSpaceGrid::two_d(1.0, 4, 0.0, 4), GridError);
}

TEST(Field, ValidatesInput) {
  const auto g = HalfSpaceGrid::one_d(1.0, 4);
  EXPECT_THROW(ScalarField(g, {1, 2, 3}), GridError);
  EXPECT_THROW(ScalarField(g, {1, 2, NAN, 4}), NonFiniteError);
  EXPECT_THROW(ScalarField(g, {1, 2, 3, 4}, -1.0), GridError);
}

TEST(FieldSequence, RequiresIncreasingTimesOnOneGrid) {
  const auto g = HalfSpaceGrid::one_d(1.0, 4);
  FieldSequence s;
  s.push_back(ScalarField::zeros(g, 0.0));
  EXPECT_THROW(s.push_back(ScalarField::zeros(g, 0.0)), GridError);
  EXPECT_THROW(s.push_back(ScalarField::zeros(HalfSpaceGrid::one_d(1.0, 8), 1.0)), GridError);
  s.push_back(ScalarField::zeros(g, 0.5));
  EXPECT_EQ(s.size(), 2u);
}

TEST(Gradient, ExactOnLinearAndQuadratic) {
  const auto g = HalfSpaceGrid::two_d(1.0, 16, 2.0, 8);
  const auto lin = gradient(ScalarField::from_function(g, [](double, double z) { return z; }));
  for (std::size_t k = 0; k < g.size(); ++k) {
    EXPECT_NEAR(lin.n.values()[k], 1.0, 1e-13);
    EXPECT_NEAR(lin.t.values()[k], 0.0, 1e-13);
  }
  // Centres 0.1, 0.3, 0.5, ...: derivative of z^2 at 0.5 is 1.
  const auto g1 = HalfSpaceGrid::one_d(1.0, 5);
  const auto quad = gradient(ScalarField::from_function(g1, [](double, double z) { return z * z; }));
  EXPECT_NEAR(quad.n(0, 2), 1.0, 1e-14);
  for (int i = 0; i < 5; ++i) EXPECT_NEAR(quad.n(0, i), 2.0 * g1.normal_center(i), 1e-13);
}

TEST(Gradient, SecondOrderOnPeriodicSine) {
  std::vector<double> errs;
  for (int n : {16, 32, 64}) {
    const double L = 3.0;
    const auto g = HalfSpaceGrid::two_d(1.0, 4, L, n);
    const auto f = ScalarField::from_function(g, [&](double t, double) { return std::sin(2 * M_PI * t / L); });
    errs.push_back(max_diff(gradient(f).t, [&](double t, double) {
      return 2 * M_PI / L * std::cos(2 * M_PI * t / L);
    }));
  }
  EXPECT_GE(convergence_order(errs[0], errs[1]), 1.9);
  EXPECT_GE(convergence_order(errs[1], errs[2]), 1.9);
}

TEST(Hessian, ExactOnQuadratics) {
  const auto g = HalfSpaceGrid::two_d(1.0, 12, 1.0, 6);
  const auto h = hessian(ScalarField::from_function(g, [](double, double z) { return z * z; }));
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(h.nn.values()[k], 2.0, 1e-10);
  // z_n z' is not periodic; check the cross derivative away from the seam.
  const auto c = hessian(ScalarField::from_function(g, [](double t, double z) { return z * t; }));
  for (int j = 1; j + 1 < 6; ++j) {
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(c.tn(j, i), 1.0, 1e-11);
  }
}

TEST(Hessian, SecondOrderOnExponential) {
  std::vector<double> errs;
  for (int n : {16, 32, 64}) {
    const auto g = HalfSpaceGrid::one_d(1.0, n);
    const auto h = hessian(ScalarField::from_function(g, [](double, double z) { return std::exp(z); }));
    errs.push_back(max_diff(h.nn, [](double, double z) { return std::exp(z); }));
  }
  EXPECT_GE(convergence_order(errs[1], errs[2]), 1.9);
}

TEST(Jet, ComposedFromStencils) {
  const auto g = HalfSpaceGrid::two_d(2.0, 16, 2 * M_PI, 16);
  const auto f = ScalarField::from_function(g, [](double t, double z) { return z * z + std::sin(t); });
  const Jet j = jet_at(f, 3, 5);
  EXPECT_DOUBLE_EQ(j.z_n, g.normal_center(5));
  EXPECT_NEAR(j.w_n, 2 * j.z_n, 1e-12);
  EXPECT_NEAR(j.w_nn, 2.0, 1e-10);
  EXPECT_NEAR(j.w_t, std::cos(g.tangential_center(3)), 2e-2);
  EXPECT_EQ(jets(f).size(), g.size());
}

TEST(Refine, LinearFieldsAndMeans) {
  const auto g = HalfSpaceGrid::two_d(1.0, 8, 1.0, 4);
  const auto lin = ScalarField::from_function(g, [](double, double z) { return 3 * z - 1; });
  const auto fine = refine(lin);
  EXPECT_LT(max_diff(fine, [](double, double z) { return 3 * z - 1; }), 1e-13);
  EXPECT_LT(max_diff(restrict_field(fine), [](double, double z) { return 3 * z - 1; }), 1e-13);

  const auto bumpy = ScalarField::from_function(g, [](double t, double z) { return std::sin(7 * z) + t * t; });
  const auto fine_grid = g.refined();
  const auto bf = ScalarField::from_function(fine_grid, [](double t, double z) { return std::cos(5 * z * t); });
  EXPECT_NEAR(restrict_field(bf).mean(), bf.mean(), 1e-14);
  EXPECT_EQ(refine(bumpy).grid(), fine_grid);
}

TEST(Interpolate, NormalColumn) {
  const auto g = HalfSpaceGrid::one_d(1.0, 10);
  const auto f = ScalarField::from_function(g, [](double, double z) { return 2 * z; });
  double v = 0.0;
  ASSERT_TRUE(interpolate_normal(f, 0, 0.5, v));
  EXPECT_NEAR(v, 1.0, 1e-14);
  EXPECT_FALSE(interpolate_normal(f, 0, 0.01, v));
}

TEST(ThirdDerivative, CubicIsConstant) {
  const auto g = HalfSpaceGrid::one_d(1.0, 32);
  const auto f = ScalarField::from_function(g, [](double, double z) { return z * z * z; });
  const auto t = third_derivative_magnitude(f);
  for (int i = 2; i < 30; ++i) EXPECT_NEAR(t(0, i), 6.0, 1e-6);
}
