// Acceptance gate. Prints one PASS/FAIL line per criterion and exits nonzero
// if any criterion fails. Pass --quick to shrink the stability grid.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>
#include <string>
#include <tuple>
#include <vector>

#include "dnwave/error.hpp"
#include "dnwave/experiments.hpp"
#include "dnwave/geometry.hpp"

using namespace dnwave;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

ExperimentConfig config_of(const std::string& text) {
  return ExperimentConfig::from_map(ConfigMap::parse(text));
}

const std::pair<double, double> kPairs[] = {{2.0, 2.0}, {3.0, 2.0}, {1.0, 3.0}, {2.0, 3.0}};

std::string failed_checks(const ExperimentResult& r) {
  std::string s;
  for (const auto& v : r.verdicts) {
    if (!v.pass) s += " [" + v.name + " = " + fmt(v.value) + " " + v.relation + " " + fmt(v.threshold) + "]";
  }
  return s;
}

Outcome exact_solution() {
  Outcome o{true, ""};
  for (auto [m, p] : {std::pair{2.0, 2.0}, std::pair{3.0, 2.0}}) {
    const auto ladder = traveling_wave_ladder(ModelParams(m, p), 0.5, {128, 256, 512});
    double secs = 0.0;
    for (const auto& l : ladder) secs += l.seconds;
    const double o1 = convergence_order(ladder[0].error, ladder[1].error);
    const double o2 = convergence_order(ladder[1].error, ladder[2].error);
    o.pass = o.pass && o1 >= 0.9 && o2 >= 0.9 && secs < 60.0;
    o.detail += "(" + fmt(m) + "," + fmt(p) + ") orders " + fmt(o1) + ", " + fmt(o2) + " in " + fmt(secs) + " s; ";
  }
  return o;
}

Outcome conservation() {
  double worst = 0.0;
  int solves = 0;
  for (auto [m, p] : kPairs) {
    const ModelParams P(m, p);
    DatumSpec bump;
    bump.family = "radial_bump";
    for (const auto& g : {HalfSpaceGrid::one_d(2.0, 128, -2.0), HalfSpaceGrid::two_d(2.0, 48, 4.0, 48, -2.0)}) {
      const auto res = solve_density(lab_density_datum(bump, P, g), 0.05, P, {});
      worst = std::max(worst, res.relative_mass_drift());
      ++solves;
    }
  }
  return {worst <= 1e-10, "max relative drift " + fmt(worst) + " over " + std::to_string(solves) + " solves"};
}

ExperimentResult stability_result;

Outcome stability(bool quick) {
  Outcome o{true, ""};
  // (1,3) travels at V = 4, so its slab reaches further down; it runs one
  // level coarser because p = 3 steps are about six times as expensive.
  for (auto [m, p, bottom, size] : {std::tuple{2.0, 2.0, -1.5, 256}, std::tuple{1.0, 3.0, -5.5, 128}}) {
    const int nn = quick ? 64 : size;
    std::ostringstream cfg;
    cfg << "experiment = stability\nm = " << m << "\np = " << p << "\nT = 1\n[grid]\nn_normal = " << nn
        << "\nn_tangential = " << nn / 2 << "\nlab_bottom = " << bottom
        << "\n[datum]\nfamily = tw_sine\nepsilon = 0.05\n";
    const auto t0 = std::chrono::steady_clock::now();
    auto r = run_stability(config_of(cfg.str()));
    const double secs = seconds_since(t0);
    const double amp = r.report["amplification"].get<double>();
    o.pass = o.pass && std::isfinite(amp) && amp <= 5.0 && secs < 300.0;
    o.detail += "(" + fmt(m) + "," + fmt(p) + ") sup|grad g - e_n| = " + fmt(amp) + " eps at " +
                std::to_string(nn) + "x" + std::to_string(nn / 2) + ", " + fmt(secs) + " s; ";
    if (m == 2.0) stability_result = std::move(r);
  }
  return o;
}

Outcome decay() {
  const auto r = run_decay(config_of(
      "experiment = decay\nT = 1\n[grid]\nn_normal = 64\nn_tangential = 32\nz_max = 8\n"
      "[datum]\nfamily = sine_bump\nepsilon = 0.025\n"));
  std::string d = "eps 0.025/0.05:";
  for (const auto& v : r.verdicts) {
    if (v.name.rfind("all entries", 0) == 0) continue;
    d += " " + fmt(v.value);
  }
  return {r.passed(), d + failed_checks(r)};
}

Outcome quadratic_nonlinearity() {
  Outcome o{true, ""};
  for (auto [m, p] : kPairs) {
    std::ostringstream cfg;
    cfg << "experiment = nonlin-ratio\nm = " << m << "\np = " << p
        << "\nT = 1\njets.samples = 100000\n[grid]\nn_normal = 32\nn_tangential = 16\nz_max = 8\n"
           "[datum]\nfamily = sine_bump\n[family]\nepsilons = 0.01, 0.02, 0.05, 0.1\n";
    const auto r = run_nonlinearity_ratio(config_of(cfg.str()));
    o.pass = o.pass && r.passed();
    o.detail += "(" + fmt(m) + "," + fmt(p) + ") var " + fmt(r.report["variation"].get<double>()) + " c " +
                fmt(r.report["pointwise_constant"].get<double>()) + "<=" +
                fmt(r.report["random_jet_constant"].get<double>()) + failed_checks(r) + "; ";
  }
  return o;
}

Outcome commutation() {
  double quadratic = 0.0;
  double linear = 0.0;
  std::vector<double> d;
  for (int n : {16, 32, 64}) {
    const auto g = HalfSpaceGrid::two_d(4.0, n, 2 * M_PI, n);
    for (double sigma : {-0.5, 0.0, 0.5, 1.0}) {
      quadratic = std::max(quadratic, check_commutation(ScalarField::from_function(g, [](double, double z) {
        return 0.5 * z * z - 2 * z + 1;
      }), sigma));
    }
    linear = std::max(linear, check_commutation(
        ScalarField::from_function(g, [](double t, double z) { return z * std::sin(t); }), 0.0));
    d.push_back(check_commutation(
        ScalarField::from_function(g, [](double t, double z) { return std::sin(z) * std::sin(t); }), 0.0));
  }
  const double o1 = convergence_order(d[0], d[1]);
  const double o2 = convergence_order(d[1], d[2]);
  const bool ok = quadratic <= 1e-12 && linear <= 1e-10 && o1 >= 1.9 && o2 >= 1.9;
  return {ok, "quadratic " + fmt(quadratic) + ", z_n sin(z') " + fmt(linear) + " (exact up to round-off)" +
                  ", sin(z_n) sin(z') orders " + fmt(o1) + ", " + fmt(o2)};
}

Outcome quasi_isometry() {
  const auto iso = stability_result.report["isometry"];
  const double lo = iso[0].get<double>();
  const double hi = iso[1].get<double>();
  const auto g = HalfSpaceGrid::two_d(4.0, 64, 2 * M_PI, 32);
  const auto id = quasi_isometry_ratio(ScalarField::from_function(g, [](double, double x) { return x; }), 100000, 1);
  const bool ok = lo >= 0.85 && hi <= 1.15 && id.min_ratio == 1.0 && id.max_ratio == 1.0;
  return {ok, "eps 0.05 ratios [" + fmt(lo) + ", " + fmt(hi) + "], identity [" + fmt(id.min_ratio) + ", " +
                  fmt(id.max_ratio) + "]"};
}

Outcome norm_oracle() {
  const auto r = run_norms(config_of(
      "experiment = norms\nT = 1\n[grid]\nn_normal = 32\nn_tangential = 16\nz_max = 8\n"
      "[datum]\nfamily = sine_bump\nepsilon = 0.05\n"));
  const auto& o = r.report["oracles"];
  return {r.passed(), "||0|| = " + fmt(o["zero_x"].get<double>() + o["zero_y"].get<double>()) + ", ||1||_Y = " +
                          fmt(o["one_y"].get<double>()) + ", homogeneity " +
                          fmt(o["homogeneity_relative_error"].get<double>()) + failed_checks(r)};
}

Outcome cross_formulation() {
  const auto r = run_cross_check(config_of(
      "experiment = cross-check\nm = 2\np = 2\nT = 0.25\n[grid]\nn_normal = 24\nn_tangential = 8\n"
      "z_max = 6\nlab_bottom = -1\nlab_top = 6\n[datum]\nfamily = sine_gauss\nepsilon = 0.02\n"
      "[ladder]\nlevels = 3\n[cross]\nx_min = 0.5\n"));
  std::string d = "discrepancies";
  for (const auto& l : r.report["levels"]) d += " " + fmt(l["discrepancy"].get<double>());
  d += ", orders";
  for (const auto& v : r.report["orders"]) d += " " + fmt(v.get<double>());
  return {r.passed(), d + failed_checks(r)};
}

Outcome stationarity() {
  double worst = 0.0;
  int pairs = 0;
  const auto g = HalfSpaceGrid::two_d(6.0, 24, 2 * M_PI, 12);
  for (double m : {0.5, 1.0, 1.5, 2.0, 3.0, 4.0}) {
    for (double p : {1.5, 2.0, 2.5, 3.0, 4.0}) {
      if (!(m + p > 3.0)) continue;
      const ModelParams P(m, p);
      ++pairs;
      for (auto form : {NonlinearityForm::Derived, NonlinearityForm::Displayed}) {
        PerturbationConfig c;
        c.form = form;
        worst = std::max(worst, perturbation_rhs(ScalarField::zeros(g), P, form).max_abs());
        worst = std::max(worst, step_perturbation(ScalarField::zeros(g), 0.5 * perturbation_dt_limit(g), P, c).max_abs());
      }
      FieldSequence z;
      for (double t : {0.0, 0.1, 0.25}) z.push_back(zeta_of(ScalarField::zeros(g, t), P));
      for (auto form : {ZetaForm::Derived, ZetaForm::Displayed}) {
        for (const auto& r : residual_transformed(z, P, TransformMeta::from(P), form)) worst = std::max(worst, r.max_abs());
      }
    }
  }
  return {worst <= 1e-13, "max |update|, |residual| = " + fmt(worst) + " over " + std::to_string(pairs) + " (m,p) pairs"};
}

}  // namespace

int main(int argc, char** argv) {
  const bool quick = argc > 1 && std::strcmp(argv[1], "--quick") == 0;
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {1, "exact-solution convergence", exact_solution},
      {2, "conservation", conservation},
      {3, "stability proxy", [&] { return stability(quick); }},
      {4, "decay proxy", decay},
      {5, "quadratic nonlinearity", quadratic_nonlinearity},
      {6, "commutation rule", commutation},
      {7, "quasi-isometry", quasi_isometry},
      {8, "norm evaluator oracle", norm_oracle},
      {9, "cross-formulation consistency", cross_formulation},
      {10, "stationarity", stationarity},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("[%s] %2d %s: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
