#include <cmath>

#include <gtest/gtest.h>

#include "dnwave/direct_solver.hpp"
#include "dnwave/error.hpp"
#include "dnwave/experiments.hpp"

using namespace dnwave;

namespace {

ScalarField tw_density(const HalfSpaceGrid& g, double tau, const ModelParams& P) {
  return ScalarField::from_function(g, [&](double, double y) { return traveling_wave_density(tau, y, P); }, tau);
}

DirectSolverConfig tw_top() {
  DirectSolverConfig c;
  c.top = TopCondition::TravelingWave;
  return c;
}

}  // namespace

TEST(StepDensity, ZeroAndConstantAreFixed) {
  const ModelParams P(2, 2);
  const auto g = HalfSpaceGrid::two_d(1.0, 8, 1.0, 4);
  const auto zero = step_density(ScalarField::zeros(g), 1e-3, P, {});
  EXPECT_EQ(zero.max_abs(), 0.0);
  const auto one = ScalarField::from_function(g, [](double, double) { return 1.0; });
  const auto next = step_density(one, 1e-3, P, {});
  for (double v : next.values()) EXPECT_DOUBLE_EQ(v, 1.0);
}

TEST(StepDensity, RejectsCflViolationAndNegativeData) {
  const ModelParams P(2, 2);
  const auto g = HalfSpaceGrid::one_d(1.0, 32);
  const auto rho = ScalarField::from_function(g, [](double, double z) { return z; });
  DirectSolverConfig c;
  const double dt = stable_dt(rho, P, c) / c.cfl_factor;
  EXPECT_NO_THROW(step_density(rho, dt, P, c));
  EXPECT_THROW(step_density(rho, 1.5 * dt, P, c), CflError);
  EXPECT_THROW(step_density(ScalarField(g, std::vector<double>(32, -1.0)), 1e-6, P, c), ParameterError);
}

TEST(StepDensity, TravelingWaveResidualSmallInBulk) {
  const ModelParams P(2, 2);
  std::vector<double> bulk;
  for (int n : {64, 128}) {
    const auto g = HalfSpaceGrid::one_d(1.0, n, -1.0);
    const auto rho = tw_density(g, 0.0, P);
    const double dt = stable_dt(rho, P, tw_top());
    const auto next = step_density(rho, dt, P, tw_top());
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      const double y = g.normal_center(i);
      if (y > 0.2) e = std::max(e, std::abs(next(0, i) - traveling_wave_density(dt, y, P)) / dt);
    }
    bulk.push_back(e);
  }
  // Linear profile: the bulk update is exact up to round-off relative to dt.
  EXPECT_LT(bulk[1], 1e-8);
}

TEST(SolveDensity, TravelingWaveConvergesAtFirstOrder) {
  for (auto [m, p] : {std::pair{2.0, 2.0}, std::pair{3.0, 2.0}}) {
    const auto ladder = traveling_wave_ladder(ModelParams(m, p), 0.5, {64, 128, 256});
    EXPECT_GE(convergence_order(ladder[0].error, ladder[1].error), 0.9);
    EXPECT_GE(convergence_order(ladder[1].error, ladder[2].error), 0.9);
  }
}

TEST(SolveDensity, ConservesMassForCompactSupport) {
  for (auto [m, p] : {std::pair{2.0, 2.0}, std::pair{1.0, 3.0}, std::pair{3.0, 2.0}}) {
    const ModelParams P(m, p);
    const auto g = HalfSpaceGrid::two_d(2.0, 32, 4.0, 32, -2.0);
    DatumSpec bump;
    bump.family = "radial_bump";
    const auto res = solve_density(lab_density_datum(bump, P, g), 0.05, P, {});
    EXPECT_LE(res.relative_mass_drift(), 1e-10) << "m=" << m << " p=" << p;
    EXPECT_EQ(res.clipped_cells, 0);
  }
}

TEST(SolveDensity, SupportReachingTheBottomIsReported) {
  const ModelParams P(2, 2);
  const auto g = HalfSpaceGrid::one_d(1.0, 16, -0.2);
  EXPECT_THROW(solve_density(tw_density(g, 0.0, P), 0.5, P, tw_top()), DomainError);
}

TEST(PressureOf, ExponentsCancel) {
  for (auto [m, p] : {std::pair{2.0, 2.0}, std::pair{3.0, 2.0}, std::pair{1.0, 3.0}}) {
    const ModelParams P(m, p);
    const auto g = HalfSpaceGrid::one_d(1.0, 10, -1.0);
    const auto pr = pressure_of(tw_density(g, 0.0, P), P);
    for (int i = 0; i < 10; ++i) EXPECT_NEAR(pr(0, i), stationary_pressure(g.normal_center(i)), 1e-14);
  }
  EXPECT_EQ(pressure_of(ScalarField::zeros(HalfSpaceGrid::one_d(1.0, 4)), ModelParams(2, 2)).max_abs(), 0.0);
}

TEST(WaveFrame, IdentityAtTimeZeroAndRoundTrip) {
  const ModelParams P(2, 2);
  const auto g = HalfSpaceGrid::one_d(2.0, 64, -1.0);
  FieldSequence s;
  s.push_back(tw_density(g, 0.0, P));
  const auto w = to_wave_frame(s, P);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_EQ(w[0].values()[k], s[0].values()[k]);

  std::vector<double> errs;
  for (int n : {32, 64, 128}) {
    const auto gg = HalfSpaceGrid::one_d(3.0, n, -1.0);
    FieldSequence a;
    a.push_back(ScalarField::from_function(gg, [](double, double y) {
      const double b = std::max(0.0, 1.0 - (y - 1) * (y - 1));
      return b * b * b * b;
    }, 0.3));
    const auto back = from_wave_frame(to_wave_frame(a, P), P);
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      const double y = gg.normal_center(i);
      if (y > -0.5 && y < 2.0) e = std::max(e, std::abs(back[0](0, i) - a[0](0, i)));
    }
    errs.push_back(e);
  }
  // the shift is not a multiple of h, so single-step orders jitter
  EXPECT_GE(0.5 * convergence_order(errs[0], errs[2]), 1.8);
}

TEST(WaveFrame, TravelingWaveIsStationary) {
  const ModelParams P(2, 2);
  const auto g = HalfSpaceGrid::one_d(1.0, 128, -1.0);
  DirectSolverConfig c = tw_top();
  c.frame = Frame::TravelingWave;
  const auto res = solve_density(tw_density(g, 0.0, P), 0.5, P, c);
  double drift = 0.0;
  for (int i = 0; i < g.n_normal(); ++i) {
    const double y = g.normal_center(i);
    if (y < 0.9) drift = std::max(drift, std::abs(res.sequence.back()(0, i) - traveling_wave_density(0.0, y, P)));
  }
  EXPECT_LT(drift, 2.0 * g.h_normal());
}

TEST(SupportBoundary, Locations) {
  const auto g = HalfSpaceGrid::one_d(1.0, 40, -1.0);
  const auto f = ScalarField::from_function(g, [](double, double y) { return std::max(0.0, y - 0.5); });
  EXPECT_NEAR(support_boundary(f, 1e-10)[0], 0.5, g.h_normal());
  EXPECT_EQ(support_boundary(ScalarField::zeros(g), 1e-10)[0], kNoBoundary);

  const ModelParams P(2, 2);
  DirectSolverConfig c = tw_top();
  const auto res = solve_density(tw_density(g, 0.0, P), 0.4, P, c);
  // the recorded trace uses the solver threshold and sees the numerical precursor
  EXPECT_LT(res.boundary_trace.back()[0], -0.4 + g.h_normal());
  EXPECT_NEAR(support_boundary(res.sequence.back(), 1e-3)[0], -0.4, 2 * g.h_normal());
}

TEST(Residual, ConstantAndExactSnapshots) {
  const ModelParams P(2, 2);
  const auto g = HalfSpaceGrid::one_d(1.0, 16);
  FieldSequence c;
  for (double t : {0.0, 0.1, 0.2}) c.push_back(ScalarField::from_function(g, [](double, double) { return 1.0; }, t));
  for (const auto& r : residual_density(c, P, {})) EXPECT_EQ(r.max_abs(), 0.0);

  std::vector<double> errs;
  for (int n : {32, 64, 128}) {
    const auto gg = HalfSpaceGrid::one_d(1.0, n, -1.0);
    FieldSequence s;
    for (int k = 0; k <= 4; ++k) s.push_back(tw_density(gg, 0.05 * k, P));
    double e = 0.0;
    for (const auto& r : residual_density(s, P, tw_top())) e = std::max(e, r.max_abs());
    errs.push_back(e);
  }
  // linear profile: the discrete flux is exact in the interior
  for (double e : errs) EXPECT_LT(e, 1e-10);
}
