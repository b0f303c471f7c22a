#include <cmath>

#include <benchmark/benchmark.h>

#include "dnwave/direct_solver.hpp"
#include "dnwave/experiments.hpp"
#include "dnwave/norms.hpp"
#include "dnwave/perturbation.hpp"

using namespace dnwave;

namespace {

ScalarField perturbed_wave(int n, const ModelParams& P) {
  const auto g = HalfSpaceGrid::two_d(4.0, n, 2 * M_PI, n / 2, -1.5);
  DatumSpec d;
  d.family = "tw_sine";
  return lab_density_datum(d, P, g);
}

ScalarField bump(int n) {
  const auto g = HalfSpaceGrid::two_d(8.0, n, 2 * M_PI, n / 2);
  return ScalarField::from_function(g, [](double t, double z) { return 0.05 * std::sin(t) * z * std::exp(-z); });
}

}  // namespace

static void BM_StepDensity(benchmark::State& state) {
  const ModelParams P(state.range(1) == 0 ? 2.0 : 1.0, state.range(1) == 0 ? 2.0 : 3.0);
  const auto rho = perturbed_wave(static_cast<int>(state.range(0)), P);
  DirectSolverConfig c;
  c.top = TopCondition::TravelingWave;
  const double dt = stable_dt(rho, P, c);
  for (auto _ : state) benchmark::DoNotOptimize(step_density(rho, dt, P, c));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(rho.grid().size()));
}
BENCHMARK(BM_StepDensity)->Args({64, 0})->Args({256, 0})->Args({256, 1})->Unit(benchmark::kMicrosecond);

static void BM_PerturbationRhs(benchmark::State& state) {
  const ModelParams P(2, 2);
  const auto w = bump(static_cast<int>(state.range(0)));
  const auto form = state.range(1) == 0 ? NonlinearityForm::Derived : NonlinearityForm::Displayed;
  for (auto _ : state) benchmark::DoNotOptimize(perturbation_rhs(w, P, form));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(w.grid().size()));
}
BENCHMARK(BM_PerturbationRhs)->Args({64, 0})->Args({128, 0})->Args({128, 1})->Unit(benchmark::kMicrosecond);

static void BM_XNorm(benchmark::State& state) {
  const auto g = HalfSpaceGrid::two_d(8.0, static_cast<int>(state.range(0)), 2 * M_PI, static_cast<int>(state.range(0)) / 2);
  FieldSequence w;
  for (double t : geometric_times(0.01, 1.0, 12)) {
    w.push_back(ScalarField::from_function(g, [t](double x, double z) {
      return 0.05 * std::sin(x) * z * std::exp(-z - t);
    }, t));
  }
  for (auto _ : state) benchmark::DoNotOptimize(x_norm(w, 8.0, 1.0));
}
BENCHMARK(BM_XNorm)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_CcBall(benchmark::State& state) {
  const auto g = HalfSpaceGrid::two_d(8.0, 128, 2 * M_PI, 64);
  for (auto _ : state) benchmark::DoNotOptimize(cc_ball(g, {1.0, 0.5}, 0.5));
}
BENCHMARK(BM_CcBall)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
