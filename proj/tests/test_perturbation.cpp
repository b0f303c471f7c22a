#include <cmath>

#include <gtest/gtest.h>

#include "dnwave/error.hpp"
#include "dnwave/experiments.hpp"
#include "dnwave/perturbation.hpp"

using namespace dnwave;

namespace {

const std::pair<double, double> kPairs[] = {{2.0, 2.0}, {3.0, 2.0}, {1.0, 3.0}, {2.0, 3.0}};

ScalarField sine_bump(const HalfSpaceGrid& g, double eps) {
  return ScalarField::from_function(g, [&](double t, double z) {
    return eps * std::sin(2 * M_PI * t / g.tangential_extent()) * z * std::exp(-z);
  });
}

}  // namespace

TEST(LSigmaField, ExactOnLowDegree) {
  const auto g = HalfSpaceGrid::two_d(3.0, 12, 1.0, 4);
  const auto c = apply_L_sigma(ScalarField::from_function(g, [](double, double) { return 2.5; }), 0.7);
  EXPECT_LT(c.max_abs(), 1e-12);
  const auto q = apply_L_sigma(ScalarField::from_function(g, [](double, double z) { return z * z; }), 0.0);
  for (int j = 0; j < 4; ++j) {
    for (int i = 0; i < 12; ++i) EXPECT_NEAR(q(j, i), -4.0 * g.normal_center(i), 1e-11);
  }
  const auto l = apply_L_sigma(ScalarField::from_function(g, [](double, double z) { return z; }), 1.0);
  for (double v : l.values()) EXPECT_NEAR(v, -2.0, 1e-12);
}

TEST(Commutation, QuadraticsAndConstants) {
  const auto g = HalfSpaceGrid::two_d(4.0, 32, 2 * M_PI, 8);
  for (double sigma : {-0.5, 0.0, 1.0}) {
    const auto w = ScalarField::from_function(g, [](double, double z) { return 0.5 * z * z - z + 3.0; });
    EXPECT_LE(check_commutation(w, sigma), 1e-12);
    EXPECT_LE(check_commutation(ScalarField::from_function(g, [](double, double) { return 1.0; }), sigma), 1e-12);
  }
}

TEST(Commutation, SecondOrderOnSine) {
  std::vector<double> d;
  for (int n : {16, 32, 64}) {
    const auto g = HalfSpaceGrid::two_d(4.0, n, 2 * M_PI, n);
    // linear in z_n: the stencils commute exactly, only round-off remains
    EXPECT_LE(check_commutation(ScalarField::from_function(g, [](double t, double z) { return z * std::sin(t); }), 0.0), 1e-10);
    d.push_back(check_commutation(ScalarField::from_function(g, [](double t, double z) { return std::sin(z) * std::sin(t); }), 0.0));
  }
  EXPECT_GE(convergence_order(d[0], d[1]), 1.9);
  EXPECT_GE(convergence_order(d[1], d[2]), 1.9);
}

TEST(StepPerturbation, ZeroIsExactFixedPoint) {
  const auto g = HalfSpaceGrid::two_d(6.0, 24, 2 * M_PI, 8);
  for (auto [m, p] : kPairs) {
    const ModelParams P(m, p);
    for (auto form : {NonlinearityForm::Derived, NonlinearityForm::Displayed}) {
      PerturbationConfig c;
      c.form = form;
      EXPECT_EQ(perturbation_rhs(ScalarField::zeros(g), P, form).max_abs(), 0.0);
      const auto next = step_perturbation(ScalarField::zeros(g), 0.5 * perturbation_dt_limit(g), P, c);
      EXPECT_EQ(next.max_abs(), 0.0);
    }
  }
}

TEST(StepPerturbation, LinearProfileDrift) {
  const ModelParams P(2, 2);
  const auto g = HalfSpaceGrid::one_d(2.0, 16);
  const auto w = ScalarField::from_function(g, [](double, double z) { return 0.1 * z; });
  const double dt = 0.5 * perturbation_dt_limit(g);
  const auto next = step_perturbation(w, dt, P, {});
  for (int i = 0; i + 1 < 16; ++i) {
    EXPECT_NEAR(next(0, i) - w(0, i), dt * (-1.0 / 110.0 + 0.1), 1e-14);
  }
}

TEST(StepPerturbation, SineBumpDecaysOverFirstStep) {
  const ModelParams P(2, 2);
  for (int n : {32, 64}) {
    const auto g = HalfSpaceGrid::two_d(8.0, n, 2 * M_PI, n / 2);
    const auto w = sine_bump(g, 0.01);
    const auto next = step_perturbation(w, 0.5 * perturbation_dt_limit(g), P, {});
    EXPECT_LT(next.max_abs(), w.max_abs());
  }
}

TEST(StepPerturbation, RejectsLargeSteps) {
  const auto g = HalfSpaceGrid::one_d(2.0, 16);
  EXPECT_THROW(step_perturbation(ScalarField::zeros(g), 2.0 * perturbation_dt_limit(g), ModelParams(2, 2), {}), CflError);
}

TEST(SolvePerturbation, ZeroStaysZero) {
  const auto g = HalfSpaceGrid::two_d(4.0, 16, 2 * M_PI, 8);
  PerturbationConfig c;
  c.snapshot_times = {0.1, 0.2};
  const auto s = solve_perturbation(ScalarField::zeros(g), 0.3, ModelParams(3, 2), c);
  ASSERT_EQ(s.size(), 4u);
  for (const auto& f : s) EXPECT_EQ(f.max_abs(), 0.0);
}

TEST(SolvePerturbation, GradientStaysBounded) {
  const ModelParams P(2, 2);
  const auto g = HalfSpaceGrid::two_d(8.0, 32, 2 * M_PI, 16);
  PerturbationConfig c;
  c.snapshot_times = geometric_times(0.01, 1.0, 6);
  const auto s = solve_perturbation(sine_bump(g, 0.05), 1.0, P, c);
  for (const auto& f : s) EXPECT_LE(magnitude(gradient(f)).max_abs(), 5 * 0.05);
}

TEST(SolvePerturbation, SelfConvergence) {
  const ModelParams P(2, 2);
  std::vector<ScalarField> finals;
  for (int n : {16, 32, 64}) {
    const auto g = HalfSpaceGrid::two_d(8.0, n, 2 * M_PI, n / 2);
    finals.push_back(solve_perturbation(sine_bump(g, 0.05), 0.25, P, {}).back());
  }
  const auto diff = [](const ScalarField& coarse, const ScalarField& fine) {
    const auto r = restrict_field(fine);
    double e = 0.0;
    for (std::size_t k = 0; k < r.values().size(); ++k) e = std::max(e, std::abs(r.values()[k] - coarse.values()[k]));
    return e;
  };
  const double e1 = diff(finals[0], finals[1]);
  const double e2 = diff(finals[1], finals[2]);
  EXPECT_GE(convergence_order(e1, e2), 0.9);
}

TEST(Transformed, StationaryResidualVanishes) {
  for (auto [m, p] : kPairs) {
    const ModelParams P(m, p);
    const auto g = HalfSpaceGrid::two_d(4.0, 16, 2 * M_PI, 8);
    FieldSequence z;
    for (double t : {0.0, 0.1, 0.3}) z.push_back(zeta_of(ScalarField::zeros(g, t), P));
    for (auto form : {ZetaForm::Derived, ZetaForm::Displayed}) {
      for (const auto& r : residual_transformed(z, P, TransformMeta::from(P), form)) {
        EXPECT_LT(r.max_abs(), 1e-13) << "m=" << m << " p=" << p;
      }
    }
  }
}

TEST(Transformed, LinearProfileResidualIsConstant) {
  const double a = 0.1;
  for (auto [m, p] : kPairs) {
    const ModelParams P(m, p);
    const auto g = HalfSpaceGrid::one_d(2.0, 16);
    FieldSequence z;
    for (double t : {0.0, 0.2}) z.push_back(ScalarField::from_function(g, [&](double, double x) { return (1 + a) * x; }, t));
    const double expect = -(1.0 - std::pow(1 + a, 1 - p)) / (m + p - 3);
    const auto r = residual_transformed(z, P, TransformMeta::from(P));
    for (double v : r[0].values()) EXPECT_NEAR(v, expect, 1e-12);
  }
}

TEST(Transformed, SolverResidualDecreases) {
  const ModelParams P(2, 2);
  const auto meta = TransformMeta::from(P);
  std::vector<double> errs;
  for (int n : {16, 32, 64}) {
    const auto g = HalfSpaceGrid::two_d(8.0, n, 2 * M_PI, n / 2);
    PerturbationConfig c;
    // close snapshots so the trapezoidal time error stays below the spatial one
    c.snapshot_times = {0.1, 0.11};
    const auto w = solve_perturbation(sine_bump(g, 0.05), 0.12, P, c);
    FieldSequence z;
    for (const auto& f : w) z.push_back(zeta_of(f, P));
    double e = 0.0;
    const auto r = residual_norms(residual_transformed(z, P, meta), n / 4);
    for (std::size_t k = 1; k < r.size(); ++k) e = std::max(e, r[k].max_residual);
    errs.push_back(e);
  }
  EXPECT_GE(convergence_order(errs[1], errs[2]), 0.9);
}

TEST(Transformed, ZetaRoundTrip) {
  const ModelParams P(1, 3);
  const auto g = HalfSpaceGrid::two_d(4.0, 16, 2 * M_PI, 8);
  const auto w = sine_bump(g, 0.05);
  const auto z = zeta_of(w, P);
  EXPECT_NEAR(z.grid().tangential_extent(), 2 * M_PI / std::sqrt(2.0), 1e-14);
  const auto back = perturbation_of(z, P);
  for (std::size_t k = 0; k < g.size(); ++k) EXPECT_NEAR(back.values()[k], w.values()[k], 1e-15);
}

TEST(Transformed, MetaScales) {
  const auto m = TransformMeta::from(ModelParams(1, 3));
  EXPECT_DOUBLE_EQ(m.time_scale_total, 4.0);
  EXPECT_DOUBLE_EQ(m.tangential_scale, std::sqrt(2.0));
}

TEST(GeometricTimes, EndpointsAndSpacing) {
  const auto t = geometric_times(0.01, 1.0, 4);
  ASSERT_EQ(t.size(), 9u);
  EXPECT_DOUBLE_EQ(t.front(), 0.01);
  EXPECT_NEAR(t.back(), 1.0, 1e-15);
  EXPECT_NEAR(t[1] / t[0], std::pow(10.0, 0.25), 1e-12);
}
