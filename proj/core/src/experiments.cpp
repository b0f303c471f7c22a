#include "dnwave/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "dnwave/error.hpp"
#include "dnwave/field_io.hpp"
#include "dnwave/geometry.hpp"
#include "dnwave/hodograph.hpp"

namespace dnwave {

namespace {

const std::vector<std::string> kPerturbationFamilies{"zero", "sine_bump", "sine_gauss"};
const std::vector<std::string> kLabFamilies{"tw", "tw_sine", "radial_bump"};

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

double max_of(const std::vector<double>& v) {
  double out = 0.0;
  for (double x : v) out = std::max(out, x);
  return out;
}

std::vector<double> orders_of(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 1; i < errors.size(); ++i) {
    out.push_back(convergence_order(errors[i - 1], errors[i]));
  }
  return out;
}

double min_or_zero(const std::vector<double>& v) {
  return v.empty() ? 0.0 : *std::min_element(v.begin(), v.end());
}

std::string form_name(NonlinearityForm f) {
  return f == NonlinearityForm::Derived ? "derived" : "displayed";
}

std::vector<double> uniform_times(double T, int count) {
  std::vector<double> out;
  for (int k = 1; k < count; ++k) out.push_back(T * k / count);
  return out;
}

FieldSequence gradient_component(const FieldSequence& w, bool normal) {
  FieldSequence out;
  for (const auto& f : w) {
    auto g = gradient(f);
    out.push_back(normal ? g.n : g.t);
  }
  return out;
}

FieldSequence time_derivatives(const FieldSequence& seq) {
  FieldSequence out;
  for (std::size_t k = 0; k < seq.size(); ++k) out.push_back(time_derivative(seq, k));
  return out;
}

}  // namespace

bool DatumSpec::is_perturbation_family() const { return contains(kPerturbationFamilies, family); }
bool DatumSpec::is_lab_family() const { return contains(kLabFamilies, family); }

std::function<double(double, double)> perturbation_datum(const DatumSpec& datum, int dim) {
  const double eps = datum.epsilon;
  const double k = datum.wavenumber;
  const auto tangential = [=](double zt) { return dim == 2 ? std::sin(k * zt) : 1.0; };
  if (datum.family == "zero") return [](double, double) { return 0.0; };
  if (datum.family == "sine_bump") {
    return [=](double zt, double zn) { return eps * tangential(zt) * zn * std::exp(-zn); };
  }
  if (datum.family == "sine_gauss") {
    return [=](double zt, double zn) { return eps * tangential(zt) * zn * std::exp(-zn * zn); };
  }
  throw ConfigError("unknown perturbation datum family '" + datum.family + "'");
}

ScalarField lab_density_datum(const DatumSpec& datum, const ModelParams& params,
                              const HalfSpaceGrid& grid) {
  const double inv_kappa = 1.0 / params.kappa();
  const auto density = [&](double g) { return g > 0.0 ? std::pow(g, inv_kappa) : 0.0; };
  const int dim = grid.dim();
  if (datum.family == "tw") {
    return ScalarField::from_function(
        grid, [&](double, double y) { return traveling_wave_density(0.0, y, params); });
  }
  if (datum.family == "tw_sine") {
    const double eps = datum.epsilon;
    const double k = datum.wavenumber;
    return ScalarField::from_function(grid, [&](double yt, double y) {
      if (y <= 0.0) return 0.0;
      const double s = dim == 2 ? std::sin(k * yt) : 1.0;
      return density(y + eps * s * y * std::exp(-y * y));
    });
  }
  if (datum.family == "radial_bump") {
    const double ct = 0.5 * grid.tangential_extent();
    const double cn = 0.5 * (grid.z_min() + grid.z_max());
    const double r2 = datum.radius * datum.radius;
    return ScalarField::from_function(grid, [&](double yt, double y) {
      const double d2 = (dim == 2 ? (yt - ct) * (yt - ct) : 0.0) + (y - cn) * (y - cn);
      return density(1.0 - d2 / r2);
    });
  }
  if (datum.is_perturbation_family()) {
    // zeta0(x', x_n) = x_n + w0(sqrt(p-1) x', x_n); g0(y) = x_n where zeta0 = y_n.
    const auto w0 = perturbation_datum(datum, dim);
    const double s = std::sqrt(params.p() - 1.0);
    return ScalarField::from_function(grid, [&](double yt, double y) {
      const auto zeta = [&](double x) { return x + w0(s * yt, x); };
      if (y <= zeta(0.0)) return 0.0;
      double lo = 0.0;
      double hi = 2.0 * y + 1.0;
      if (zeta(hi) < y) throw ParameterError("perturbation datum is not monotone in x_n");
      for (int it = 0; it < 200 && hi - lo > 1e-15 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (zeta(mid) < y ? lo : hi) = mid;
      }
      return density(0.5 * (lo + hi));
    });
  }
  throw ConfigError("unknown datum family '" + datum.family + "'");
}

ExperimentConfig ExperimentConfig::from_map(const ConfigMap& map) {
  ExperimentConfig c;
  c.experiment = map.get_string("experiment", c.experiment);
  c.m = map.get_double("m", c.m);
  c.p = map.get_double("p", c.p);
  c.dim = map.get_int("grid.dim", c.dim);
  c.n_normal = map.get_int("grid.n_normal", c.n_normal);
  c.n_tangential = map.get_int("grid.n_tangential", c.n_tangential);
  c.tangential_extent = map.get_double("grid.tangential_extent", c.tangential_extent);
  c.z_max = map.get_double("grid.z_max", c.z_max);
  c.lab_bottom = map.get_double("grid.lab_bottom", c.lab_bottom);
  c.lab_top = map.get_double("grid.lab_top", c.lab_top);
  c.datum.family = map.get_string("datum.family", c.datum.family);
  c.datum.epsilon = map.get_double("datum.epsilon", c.datum.epsilon);
  c.datum.wavenumber = map.get_double("datum.wavenumber", c.datum.wavenumber);
  c.datum.radius = map.get_double("datum.radius", c.datum.radius);
  c.T = map.get_double("T", c.T);

  c.direct.cfl_factor = map.get_double("direct.cfl", c.direct.cfl_factor);
  if (map.has("direct.delta")) c.direct.delta = map.get_double("direct.delta", 0.0);
  c.direct.positivity_threshold =
      map.get_double("direct.positivity_threshold", c.direct.positivity_threshold);
  const std::string top = map.get_string("direct.top", "traveling_wave");
  if (top == "traveling_wave") {
    c.direct.top = TopCondition::TravelingWave;
  } else if (top == "no_flux") {
    c.direct.top = TopCondition::NoFlux;
  } else {
    throw ConfigError("direct.top must be traveling_wave or no_flux");
  }

  c.perturbation.cfl_factor = map.get_double("perturbation.cfl", c.perturbation.cfl_factor);
  c.perturbation.max_gradient = map.get_double("perturbation.max_gradient", c.perturbation.max_gradient);
  const std::string form = map.get_string("perturbation.form", "derived");
  if (form == "derived") {
    c.perturbation.form = NonlinearityForm::Derived;
  } else if (form == "displayed") {
    c.perturbation.form = NonlinearityForm::Displayed;
  } else {
    throw ConfigError("perturbation.form must be derived or displayed");
  }

  c.q = map.get_double("norms.q", c.q);
  c.lattice.levels_per_octave = map.get_int("norms.levels_per_octave", c.lattice.levels_per_octave);
  c.lattice.r2_min = map.get_double("norms.r2_min", c.lattice.r2_min);
  c.lattice.stride = map.get_int("norms.stride", c.lattice.stride);
  c.snapshots_per_decade = map.get_int("time.snapshots_per_decade", c.snapshots_per_decade);
  c.t_first = map.get_double("time.t_first", c.t_first);
  c.levels = map.get_int("ladder.levels", c.levels);
  c.cross_x_min = map.get_double("cross.x_min", c.cross_x_min);
  c.front_layer = map.get_double("stability.front_layer", c.front_layer);
  c.epsilons = map.get_doubles("family.epsilons", c.epsilons);
  c.random_samples =
      static_cast<std::size_t>(map.get_int("jets.samples", static_cast<int>(c.random_samples)));
  c.out_dir = map.get_string("out_dir", c.out_dir.string());
  if (map.has("seed")) {
    try {
      c.seed = std::stoull(map.get_string("seed", "0"));
    } catch (const std::exception&) {
      throw ConfigError("seed must be an unsigned integer");
    }
  }
  c.write_fields = map.get_bool("output.write_fields", c.write_fields);

  auto& t = c.thresholds;
  t.amplification = map.get_double("thresholds.amplification", t.amplification);
  t.quadratic_variation = map.get_double("thresholds.quadratic_variation", t.quadratic_variation);
  t.min_order = map.get_double("thresholds.min_order", t.min_order);
  t.refinement_factor = map.get_double("thresholds.refinement_factor", t.refinement_factor);
  t.linearity_tolerance = map.get_double("thresholds.linearity_tolerance", t.linearity_tolerance);
  t.mass_drift = map.get_double("thresholds.mass_drift", t.mass_drift);
  t.isometry_band = map.get_double("thresholds.isometry_band", t.isometry_band);
  t.cross_isometry_band = map.get_double("thresholds.cross_isometry_band", t.cross_isometry_band);
  t.y_one_tolerance = map.get_double("thresholds.y_one_tolerance", t.y_one_tolerance);

  const auto unused = map.unused_keys();
  if (!unused.empty()) {
    std::string msg = "unknown config key(s):";
    for (const auto& k : unused) msg += " " + k;
    throw ConfigError(msg);
  }
  return c;
}

void ExperimentConfig::validate(bool norms_requested) const {
  const ModelParams params(m, p);
  if (dim != 1 && dim != 2) throw ConfigError("grid.dim must be 1 or 2");
  if (n_normal < 4 || (dim == 2 && n_tangential < 4)) throw ConfigError("grid needs >= 4 cells per axis");
  if (!datum.is_perturbation_family() && !datum.is_lab_family()) {
    throw ConfigError("unknown datum family '" + datum.family + "'");
  }
  if (!(datum.epsilon >= 0.0)) throw ConfigError("datum.epsilon must be >= 0");
  for (double e : epsilons) {
    if (!(e >= 0.0)) throw ConfigError("family.epsilons must be >= 0");
  }
  if (!(T > 0.0)) throw ConfigError("T must be positive");
  if (!(t_first > 0.0 && t_first < T)) throw ConfigError("time.t_first must lie in (0, T)");
  if (snapshots_per_decade < 1) throw ConfigError("time.snapshots_per_decade must be >= 1");
  if (levels < 2) throw ConfigError("ladder.levels must be >= 2");
  if (!(lab_top > lab_bottom)) throw ConfigError("grid.lab_top must exceed grid.lab_bottom");
  if (!(cross_x_min >= 0.0 && cross_x_min < 0.5 * z_max)) {
    throw ConfigError("cross.x_min must lie in [0, z_max / 2)");
  }
  direct.validate(params);
  perturbation.validate();
  if (norms_requested) {
    const double bound = std::max(2.0 * (dim + 1), 1.0 / (1.0 + params.sigma()));
    if (!(q > bound) || !std::isfinite(q)) {
      std::ostringstream os;
      os << "norms.q = " << q << " must exceed max{2(n+1), 1/(1+sigma)} = " << bound;
      throw ConfigError(os.str());
    }
  }
}

HalfSpaceGrid ExperimentConfig::perturbation_grid() const {
  return dim == 2 ? HalfSpaceGrid::two_d(z_max, n_normal, tangential_extent, n_tangential)
                  : HalfSpaceGrid::one_d(z_max, n_normal);
}

HalfSpaceGrid ExperimentConfig::lab_grid() const {
  return dim == 2
             ? HalfSpaceGrid::two_d(lab_top, n_normal, tangential_extent, n_tangential, lab_bottom)
             : HalfSpaceGrid::one_d(lab_top, n_normal, lab_bottom);
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"experiment", experiment},
          {"m", m},
          {"p", p},
          {"grid",
           {{"dim", dim},
            {"n_normal", n_normal},
            {"n_tangential", n_tangential},
            {"tangential_extent", tangential_extent},
            {"z_max", z_max},
            {"lab_bottom", lab_bottom},
            {"lab_top", lab_top}}},
          {"datum",
           {{"family", datum.family},
            {"epsilon", datum.epsilon},
            {"wavenumber", datum.wavenumber},
            {"radius", datum.radius}}},
          {"T", T},
          {"direct",
           {{"cfl", direct.cfl_factor},
            {"delta", direct.regularization(params())},
            {"top", direct.top == TopCondition::TravelingWave ? "traveling_wave" : "no_flux"}}},
          {"perturbation",
           {{"cfl", perturbation.cfl_factor},
            {"form", form_name(perturbation.form)},
            {"max_gradient", perturbation.max_gradient}}},
          {"norms", {{"q", q}, {"lattice", lattice.to_json()}}},
          {"time", {{"snapshots_per_decade", snapshots_per_decade}, {"t_first", t_first}}},
          {"ladder_levels", levels},
          {"cross_x_min", cross_x_min},
          {"front_layer", front_layer},
          {"epsilons", epsilons},
          {"seed", seed},
          {"thresholds",
           {{"amplification", thresholds.amplification},
            {"quadratic_variation", thresholds.quadratic_variation},
            {"min_order", thresholds.min_order},
            {"refinement_factor", thresholds.refinement_factor},
            {"linearity_tolerance", thresholds.linearity_tolerance},
            {"mass_drift", thresholds.mass_drift},
            {"isometry_band", thresholds.isometry_band},
            {"cross_isometry_band", thresholds.cross_isometry_band},
            {"y_one_tolerance", thresholds.y_one_tolerance}}}};
}

nlohmann::json Verdict::to_json() const {
  return {{"name", name}, {"value", value}, {"threshold", threshold}, {"relation", relation},
          {"pass", pass}};
}

Verdict check_le(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, "<=", std::isfinite(value) && value <= threshold};
}

Verdict check_ge(std::string name, double value, double threshold) {
  return {std::move(name), value, threshold, ">=", std::isfinite(value) && value >= threshold};
}

bool ExperimentResult::passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.pass; });
}

nlohmann::json ExperimentResult::verdict_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& v : verdicts) list.push_back(v.to_json());
  return {{"experiment", experiment}, {"pass", passed()}, {"checks", list}};
}

void write_result(const ExperimentResult& result, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  nlohmann::json j = {{"report", result.report}, {"verdict", result.verdict_json()}};
  write_json(out_dir / (result.experiment + ".json"), j);
}

// ---------------------------------------------------------------------------

double pressure_deviation(const ScalarField& g, double front_layer) {
  const auto& grid = g.grid();
  const double level = front_layer * grid.h_normal();
  const auto grad = gradient(g);
  double out = 0.0;
  for (int j = 0; j < grid.n_tangential(); ++j) {
    for (int i = 1; i + 1 < grid.n_normal(); ++i) {
      bool inside = g(j, i) >= level && g(j, i - 1) >= level && g(j, i + 1) >= level;
      if (grid.dim() == 2) inside = inside && g(grid.wrap(j - 1), i) >= level && g(grid.wrap(j + 1), i) >= level;
      if (!inside) continue;
      const std::size_t c = grid.index(j, i);
      out = std::max(out, std::hypot(grad.t.values()[c], grad.n.values()[c] - 1.0));
    }
  }
  return out;
}

double random_jet_constant(const ModelParams& params, NonlinearityForm form, std::size_t count,
                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> zn(0.0, 10.0);
  std::uniform_real_distribution<double> first(-0.5, 0.5);
  std::uniform_real_distribution<double> second(-5.0, 5.0);
  double worst = 0.0;
  for (std::size_t s = 0; s < count; ++s) {
    Jet j;
    j.z_n = zn(rng);
    j.w_t = first(rng);
    j.w_n = first(rng);
    j.w_tt = second(rng);
    j.w_tn = second(rng);
    j.w_nn = second(rng);
    const double bound = nonlinearity_bound_rhs(j);
    if (bound <= 0.0) continue;
    worst = std::max(worst, std::abs(nonlinearity(j, params, form)) / bound);
  }
  return worst;
}

FieldSequence solve_perturbation_family(const ExperimentConfig& config, const DatumSpec& datum,
                                        const HalfSpaceGrid& grid) {
  if (!datum.is_perturbation_family()) {
    throw ConfigError("datum family '" + datum.family + "' is not a perturbation family");
  }
  const auto w0 = ScalarField::from_function(grid, perturbation_datum(datum, grid.dim()));
  PerturbationConfig pc = config.perturbation;
  pc.snapshot_times = geometric_times(config.t_first, config.T, config.snapshots_per_decade);
  return solve_perturbation(w0, config.T, config.params(), pc);
}

const DecayEntry& DecayReport::entry(int k, int beta) const {
  for (const auto& e : entries) {
    if (e.k == k && e.beta == beta) return e;
  }
  throw ParameterError("decay entry not present");
}

nlohmann::json DecayReport::to_json() const {
  nlohmann::json list = nlohmann::json::array();
  for (const auto& e : entries) {
    list.push_back({{"k", e.k},
                    {"beta", e.beta},
                    {"times", e.times},
                    {"values", e.values},
                    {"sup", e.sup},
                    {"sup_over_lipschitz", e.sup_over_lipschitz}});
  }
  return {{"lipschitz0", lipschitz0}, {"entries", list}};
}

DecayReport decay_report(const FieldSequence& w, double t_lo, double t_hi) {
  if (w.size() < 3) throw SnapshotDensityError("decay report needs at least three snapshots");
  const auto& grid = w.grid();
  const auto gt = gradient_component(w, false);
  const auto gn = gradient_component(w, true);
  const auto dgt = time_derivatives(gt);
  const auto dgn = time_derivatives(gn);
  const auto ddgt = time_derivatives(dgt);
  const auto ddgn = time_derivatives(dgn);

  // Hessian components for d_t grad^2 w.
  FieldSequence htt;
  FieldSequence htn;
  FieldSequence hnn;
  for (const auto& f : w) {
    auto h = hessian(f);
    htt.push_back(h.tt);
    htn.push_back(h.tn);
    hnn.push_back(h.nn);
  }
  const auto dtt = time_derivatives(htt);
  const auto dtn = time_derivatives(htn);
  const auto dnn = time_derivatives(hnn);

  DecayReport rep;
  rep.lipschitz0 = lipschitz_seminorm(w.front());
  for (const auto& [k, b] : {std::pair{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}}) {
    DecayEntry e;
    e.k = k;
    e.beta = b;
    rep.entries.push_back(e);
  }
  const double tol = 1e-12 * t_hi;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double t = w[k].time();
    if (t < t_lo - tol || t > t_hi + tol) continue;
    const auto vec_sup = [](const ScalarField& a, const ScalarField& b) {
      double s = 0.0;
      for (std::size_t c = 0; c < a.values().size(); ++c) {
        s = std::max(s, std::hypot(a.values()[c], b.values()[c]));
      }
      return s;
    };
    double hess_dt = 0.0;
    for (std::size_t c = 0; c < grid.size(); ++c) {
      const double a = dtt[k].values()[c];
      const double b = dtn[k].values()[c];
      const double d = dnn[k].values()[c];
      hess_dt = std::max(hess_dt, std::sqrt(a * a + 2.0 * b * b + d * d));
    }
    const double values[] = {
        vec_sup(gt[k], gn[k]),
        t * magnitude(hessian(w[k])).max_abs(),
        t * vec_sup(dgt[k], dgn[k]),
        t * t * third_derivative_magnitude(w[k]).max_abs(),
        t * t * hess_dt,
        t * t * vec_sup(ddgt[k], ddgn[k]),
    };
    for (std::size_t e = 0; e < rep.entries.size(); ++e) {
      rep.entries[e].times.push_back(t);
      rep.entries[e].values.push_back(values[e]);
    }
  }
  for (auto& e : rep.entries) {
    e.sup = max_of(e.values);
    e.sup_over_lipschitz = rep.lipschitz0 > 0.0 ? e.sup / rep.lipschitz0 : 0.0;
  }
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentResult run_simulate_direct(const ExperimentConfig& config) {
  config.validate(false);
  const ModelParams params = config.params();
  const auto grid = config.lab_grid();
  DirectSolverConfig dc = config.direct;
  // A compact bump has no wave to feed through the top.
  if (config.datum.family == "radial_bump") dc.top = TopCondition::NoFlux;
  dc.snapshot_times = uniform_times(config.T, 10);
  const auto result = solve_density(lab_density_datum(config.datum, params, grid), config.T, params, dc);

  nlohmann::json snaps = nlohmann::json::array();
  const auto residual = residual_density(result.sequence, params, dc);
  for (std::size_t k = 0; k < result.sequence.size(); ++k) {
    const auto& b = result.boundary_trace[k];
    nlohmann::json row = {{"tau", result.sequence[k].time()},
                          {"mass", result.sequence[k].integral()},
                          {"front_min", *std::min_element(b.begin(), b.end())},
                          {"front_max", *std::max_element(b.begin(), b.end())}};
    if (k > 0) row["max_residual"] = residual[k - 1].max_abs();
    snaps.push_back(row);
  }
  ExperimentResult out;
  out.experiment = "simulate-direct";
  out.report = {{"config", config.to_json()},
                {"steps", result.steps()},
                {"snapshots", snaps},
                {"relative_mass_drift", result.relative_mass_drift()},
                {"clipped_mass", result.clipped_mass},
                {"clipped_cells", result.clipped_cells}};
  double worst = 0.0;
  for (const auto& f : result.sequence) worst = std::max(worst, f.max_abs());
  out.verdicts.push_back(check_le("density finite", std::isfinite(worst) ? 0.0 : 1.0, 0.0));
  if (dc.top == TopCondition::NoFlux) {
    out.verdicts.push_back(check_le("relative mass drift", result.relative_mass_drift(), config.thresholds.mass_drift));
  }
  const auto dir = config.out_dir / "fields";
  write_sequence(dir, "density", result.sequence, params);
  FieldSequence g;
  for (const auto& rho : result.sequence) g.push_back(pressure_of(rho, params));
  write_sequence(dir, "pressure", g, params);
  return out;
}

ExperimentResult run_simulate_perturbation(const ExperimentConfig& config) {
  config.validate(false);
  const ModelParams params = config.params();
  const auto grid = config.perturbation_grid();
  const auto w = solve_perturbation_family(config, config.datum, grid);
  FieldSequence zeta;
  for (const auto& f : w) zeta.push_back(zeta_of(f, params));
  const auto res = residual_norms(residual_transformed(zeta, params, TransformMeta::from(params),
                                                       ZetaForm::Derived),
                                  grid.n_normal() / 4);
  nlohmann::json snaps = nlohmann::json::array();
  double sup_grad = 0.0;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const double gm = magnitude(gradient(w[k])).max_abs();
    sup_grad = std::max(sup_grad, gm);
    nlohmann::json row = {{"t", w[k].time()}, {"sup_w", w[k].max_abs()}, {"sup_grad_w", gm}};
    if (k > 0) {
      row["max_residual"] = res[k - 1].max_residual;
      row["l2_residual"] = res[k - 1].l2_residual;
    }
    snaps.push_back(row);
  }
  ExperimentResult out;
  out.experiment = "simulate-perturbation";
  out.report = {{"config", config.to_json()}, {"snapshots", snaps}, {"sup_grad_w", sup_grad}};
  out.verdicts.push_back(check_le("sup |grad w| finite", std::isfinite(sup_grad) ? 0.0 : 1.0, 0.0));
  out.verdicts.push_back(check_le("sup |grad w| below the solver bound", sup_grad, config.perturbation.max_gradient));
  write_sequence(config.out_dir / "fields", "w", w, params);
  write_sequence(config.out_dir / "fields", "zeta", zeta, params);
  return out;
}

ExperimentResult run_stability(const ExperimentConfig& config) {
  config.validate(false);
  if (config.datum.epsilon > 0.1) throw ConfigError("stability runs need epsilon <= 0.1");
  const ModelParams params = config.params();
  const auto grid = config.lab_grid();
  const auto rho0 = lab_density_datum(config.datum, params, grid);
  DirectSolverConfig dc = config.direct;
  dc.frame = Frame::Lab;
  dc.top = TopCondition::TravelingWave;
  dc.snapshot_times = uniform_times(config.T, 20);
  const auto result = solve_density(rho0, config.T, params, dc);

  nlohmann::json series = nlohmann::json::array();
  double sup = 0.0;
  for (const auto& rho : result.sequence) {
    const double dev = pressure_deviation(pressure_of(rho, params), config.front_layer);
    sup = std::max(sup, dev);
    series.push_back({{"tau", rho.time()}, {"deviation", dev}});
  }
  // Quasi-isometry of x -> y at the first and last snapshot, in the wave frame.
  const double h = grid.h_normal();
  const double x_top = 0.5 * config.lab_top;
  const int nx = std::max(8, static_cast<int>(std::lround(x_top / h)));
  const auto xgrid = grid.dim() == 2
                         ? HalfSpaceGrid::two_d(x_top, nx, grid.tangential_extent(), grid.n_tangential())
                         : HalfSpaceGrid::one_d(x_top, nx);
  FieldSequence ends;
  ends.push_back(result.sequence.front());
  ends.push_back(result.sequence.back());
  // The first rows sit in the discrete front layer (an O(h) shift of zeta that
  // the exact wave shows too), so the verdict samples above it.
  const int first_row = static_cast<int>(std::ceil(config.front_layer));
  RatioRange iso{std::numeric_limits<double>::infinity(), 0.0};
  RatioRange iso_full = iso;
  const auto widen = [](RatioRange& into, const RatioRange& r) {
    into.min_ratio = std::min(into.min_ratio, r.min_ratio);
    into.max_ratio = std::max(into.max_ratio, r.max_ratio);
  };
  for (const auto& v : to_wave_frame(ends, params, dc.positivity_threshold)) {
    const auto zeta = hodograph(pressure_of(v, params), xgrid, dc.positivity_threshold);
    widen(iso, quasi_isometry_ratio(zeta, config.random_samples, config.seed, first_row));
    widen(iso_full, quasi_isometry_ratio(zeta, config.random_samples, config.seed));
  }

  const double eps = config.datum.epsilon;
  ExperimentResult out;
  out.experiment = "stability";
  out.report = {{"config", config.to_json()},
                {"series", series},
                {"sup_deviation", sup},
                {"amplification", eps > 0.0 ? sup / eps : 0.0},
                {"steps", result.steps()},
                {"clipped_mass", result.clipped_mass},
                {"isometry", {iso.min_ratio, iso.max_ratio}},
                {"isometry_full", {iso_full.min_ratio, iso_full.max_ratio}}};
  if (eps > 0.0) {
    out.verdicts.push_back(
        check_le("sup_t |grad g - e_n| / eps", sup / eps, config.thresholds.amplification));
  } else {
    // Exact traveling wave: deviation is discretisation error only.
    out.verdicts.push_back(check_le("sup_t |grad g - e_n| (eps = 0) / h", sup / grid.h_min(), 10.0));
  }
  const double band = config.thresholds.isometry_band;
  out.verdicts.push_back(check_ge("isometry min ratio", iso.min_ratio, 1.0 - band));
  out.verdicts.push_back(check_le("isometry max ratio", iso.max_ratio, 1.0 + band));
  if (config.write_fields) {
    FieldSequence g;
    for (const auto& rho : result.sequence) g.push_back(pressure_of(rho, params));
    write_sequence(config.out_dir / "fields", "pressure", g, params);
  }
  return out;
}

ExperimentResult run_decay(const ExperimentConfig& config) {
  config.validate(false);
  const auto grid = config.perturbation_grid();
  const DatumSpec& datum = config.datum;
  const auto base = decay_report(solve_perturbation_family(config, datum, grid), config.t_first, config.T);
  ExperimentResult out;
  out.experiment = "decay";
  out.report = {{"config", config.to_json()}, {"base", base.to_json()}};

  bool finite = true;
  for (const auto& e : base.entries) finite = finite && std::isfinite(e.sup);
  out.verdicts.push_back(check_le("all entries finite", finite ? 0.0 : 1.0, 0.0));

  if (datum.epsilon == 0.0 || base.lipschitz0 == 0.0) {
    double worst = 0.0;
    for (const auto& e : base.entries) worst = std::max(worst, e.sup);
    out.verdicts.push_back(check_le("zero datum entries", worst, 0.0));
    return out;
  }

  const auto fine = decay_report(solve_perturbation_family(config, datum, grid.refined()),
                                 config.t_first, config.T);
  DatumSpec doubled = datum;
  doubled.epsilon *= 2.0;
  const auto twice =
      decay_report(solve_perturbation_family(config, doubled, grid), config.t_first, config.T);
  out.report["refined"] = fine.to_json();
  out.report["doubled"] = twice.to_json();

  // Refinement is checked on the two entries the decay estimate is about;
  // linearity in the datum on every entry.
  const std::pair<int, int> watched[] = {{0, 1}, {1, 0}};
  for (const auto& [k, b] : watched) {
    const std::string tag = "(k=" + std::to_string(k) + ",|beta|=" + std::to_string(b) + ")";
    const double a = base.entry(k, b).sup;
    const double f = fine.entry(k, b).sup;
    out.verdicts.push_back(check_le("refinement factor " + tag, std::max(a / f, f / a),
                                    config.thresholds.refinement_factor));
  }
  for (const auto& e : base.entries) {
    const std::string tag = "(k=" + std::to_string(e.k) + ",|beta|=" + std::to_string(e.beta) + ")";
    const double lin = twice.entry(e.k, e.beta).sup_over_lipschitz / e.sup_over_lipschitz;
    out.verdicts.push_back(check_le("linearity |ratio(2eps)/ratio(eps) - 1| " + tag,
                                    std::abs(lin - 1.0), config.thresholds.linearity_tolerance));
  }
  return out;
}

ExperimentResult run_nonlinearity_ratio(const ExperimentConfig& config) {
  config.validate(true);
  const ModelParams params = config.params();
  const auto grid = config.perturbation_grid();
  const auto form = config.perturbation.form;
  ExperimentResult out;
  out.experiment = "nonlin-ratio";
  nlohmann::json rows = nlohmann::json::array();
  std::vector<double> ratios;
  double pointwise = 0.0;
  for (double eps : config.epsilons) {
    DatumSpec d = config.datum;
    d.epsilon = eps;
    const auto w = solve_perturbation_family(config, d, grid);
    FieldSequence nseq;
    double local = 0.0;
    for (const auto& f : w) {
      nseq.push_back(nonlinearity_field(f, params, form));
      for (const auto& jet : jets(f, TopBoundary::Mirror)) {
        const double bound = nonlinearity_bound_rhs(jet);
        if (bound < 1e-10) continue;
        local = std::max(local, std::abs(nonlinearity(jet, params, form)) / bound);
      }
    }
    const auto xr = x_norm(w, config.q, config.T, config.lattice);
    const auto yr = y_norm(nseq, config.q, config.T, config.lattice);
    const double x = xr.x_total();
    const double y = yr.y_total();
    nlohmann::json row = {{"epsilon", eps}, {"x_norm", xr.to_json()}, {"y_norm_N", yr.to_json()},
                          {"pointwise_constant", local}};
    if (x == 0.0 && y == 0.0) {
      row["ratio"] = nullptr;
      row["note"] = "exact fixed point";
    } else {
      const double r = y / (x * x);
      row["ratio"] = r;
      ratios.push_back(r);
    }
    pointwise = std::max(pointwise, local);
    rows.push_back(row);
  }
  const double jet_c = random_jet_constant(params, form, config.random_samples, config.seed);
  double variation = 1.0;
  if (!ratios.empty()) {
    variation = *std::max_element(ratios.begin(), ratios.end()) /
                *std::min_element(ratios.begin(), ratios.end());
  }
  out.report = {{"config", config.to_json()},
                {"family", rows},
                {"variation", variation},
                {"pointwise_constant", pointwise},
                {"random_jet_constant", jet_c}};
  out.verdicts.push_back(check_le("ratio variation", variation, config.thresholds.quadratic_variation));
  out.verdicts.push_back(check_le("pointwise constant (fields) <= random jet constant", pointwise,
                                  std::max(jet_c, 1e-300)));
  out.verdicts.push_back(check_le("random jet constant finite", std::isfinite(jet_c) ? 0.0 : 1.0, 0.0));
  return out;
}

CrossCheckLevel cross_check_level(const ExperimentConfig& config, int n_normal, int n_tangential) {
  const ModelParams params = config.params();
  const auto meta = TransformMeta::from(params);
  if (!config.datum.is_perturbation_family()) {
    throw ConfigError("cross-check needs a perturbation datum family");
  }
  if (n_normal % 2 != 0) throw ConfigError("cross-check needs an even normal cell count");
  const double Z = config.z_max;
  const double ratio = (config.lab_top - config.lab_bottom) / Z * n_normal;
  const int n_lab = static_cast<int>(std::lround(ratio));
  if (std::abs(ratio - n_lab) > 1e-9 * ratio) {
    throw ConfigError("cross-check needs (lab_top - lab_bottom) * n_normal / z_max to be an integer");
  }
  const int dim = config.dim;
  const double x_extent = config.tangential_extent / meta.tangential_scale;

  // Transformed side: perturbation time s = time_scale_total * tau.
  const auto zgrid = dim == 2 ? HalfSpaceGrid::two_d(Z, n_normal, config.tangential_extent, n_tangential)
                              : HalfSpaceGrid::one_d(Z, n_normal);
  const auto w0 = ScalarField::from_function(zgrid, perturbation_datum(config.datum, dim));
  PerturbationConfig pc = config.perturbation;
  pc.snapshot_times.clear();
  const auto wseq = solve_perturbation(w0, meta.time_scale_total * config.T, params, pc);
  const auto zeta_t = zeta_of(wseq.back(), params);

  // Direct side in the lab frame.
  const auto ygrid =
      dim == 2 ? HalfSpaceGrid::two_d(config.lab_top, n_lab, x_extent, n_tangential, config.lab_bottom)
               : HalfSpaceGrid::one_d(config.lab_top, n_lab, config.lab_bottom);
  DirectSolverConfig dc = config.direct;
  dc.frame = Frame::Lab;
  dc.top = TopCondition::TravelingWave;
  dc.snapshot_times.clear();
  const auto rho0 = lab_density_datum(config.datum, params, ygrid);
  const auto direct = solve_density(rho0, config.T, params, dc);
  FieldSequence last;
  last.push_back(direct.sequence.back());
  const auto wave = to_wave_frame(last, params, dc.positivity_threshold);
  const auto g = pressure_of(wave.back(), params);

  const auto xgrid = dim == 2 ? HalfSpaceGrid::two_d(0.5 * Z, n_normal / 2, x_extent, n_tangential)
                              : HalfSpaceGrid::one_d(0.5 * Z, n_normal / 2);
  const auto zeta_d = hodograph(g, xgrid, dc.positivity_threshold);

  CrossCheckLevel level;
  level.n_normal = n_normal;
  level.n_tangential = n_tangential;
  for (int j = 0; j < xgrid.n_tangential(); ++j) {
    for (int i = 0; i < xgrid.n_normal(); ++i) {
      const double e = std::abs(zeta_d(j, i) - zeta_t(j, i));
      level.discrepancy_full = std::max(level.discrepancy_full, e);
      if (xgrid.normal_center(i) >= config.cross_x_min) {
        level.discrepancy = std::max(level.discrepancy, e);
      }
    }
  }
  level.isometry = quasi_isometry_ratio(zeta_d, 10000, config.seed);
  return level;
}

ExperimentResult run_cross_check(const ExperimentConfig& config) {
  config.validate(false);
  ExperimentResult out;
  out.experiment = "cross-check";
  std::vector<CrossCheckLevel> levels;
  std::vector<double> errors;
  nlohmann::json rows = nlohmann::json::array();
  for (int l = 0; l < config.levels; ++l) {
    const int nt = config.dim == 2 ? config.n_tangential << l : 1;
    levels.push_back(cross_check_level(config, config.n_normal << l, nt));
    errors.push_back(levels.back().discrepancy);
    rows.push_back({{"n_normal", levels.back().n_normal},
                    {"n_tangential", levels.back().n_tangential},
                    {"discrepancy", levels.back().discrepancy},
                    {"discrepancy_full", levels.back().discrepancy_full},
                    {"isometry", {levels.back().isometry.min_ratio, levels.back().isometry.max_ratio}}});
  }
  const auto orders = orders_of(errors);
  out.report = {{"config", config.to_json()}, {"levels", rows}, {"orders", orders}};
  for (std::size_t i = 0; i < orders.size(); ++i) {
    out.verdicts.push_back(
        check_ge("discrepancy order level " + std::to_string(i + 1), orders[i], config.thresholds.min_order));
  }
  const auto& iso = levels.back().isometry;
  const double band = config.thresholds.cross_isometry_band;
  out.verdicts.push_back(check_ge("isometry min ratio", iso.min_ratio, 1.0 - band));
  out.verdicts.push_back(check_le("isometry max ratio", iso.max_ratio, 1.0 + band));
  return out;
}

std::vector<LadderLevel> traveling_wave_ladder(const ModelParams& params, double T,
                                               const std::vector<int>& cells) {
  std::vector<LadderLevel> out;
  const double shift = params.wave_speed() * T;
  const double lo = -std::max(1.0, shift + 0.5);
  for (int n : cells) {
    const auto start = std::chrono::steady_clock::now();
    const auto grid = HalfSpaceGrid::one_d(1.0, n, lo);
    const auto rho0 = ScalarField::from_function(
        grid, [&](double, double y) { return traveling_wave_density(0.0, y, params); });
    DirectSolverConfig dc;
    dc.top = TopCondition::TravelingWave;
    const auto res = solve_density(rho0, T, params, dc);
    const auto g = pressure_of(res.sequence.back(), params);
    LadderLevel level;
    level.cells = n;
    for (int i = 0; i < n; ++i) {
      level.error = std::max(level.error,
                             std::abs(g(0, i) - traveling_wave_pressure(T, grid.normal_center(i), params)));
    }
    level.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.push_back(level);
  }
  return out;
}

ExperimentResult run_convergence(const ExperimentConfig& config) {
  config.validate(false);
  const ModelParams params = config.params();
  ExperimentResult out;
  out.experiment = "convergence";
  const auto& th = config.thresholds;

  // Exact traveling wave, 1D.
  std::vector<int> cells;
  for (int l = 0; l < config.levels; ++l) cells.push_back(config.n_normal << l);
  const auto ladder = traveling_wave_ladder(params, config.T, cells);
  std::vector<double> tw_errors;
  nlohmann::json tw_rows = nlohmann::json::array();
  for (const auto& l : ladder) {
    tw_errors.push_back(l.error);
    tw_rows.push_back({{"cells", l.cells}, {"sup_pressure_error", l.error}});
  }
  const auto tw_orders = orders_of(tw_errors);
  out.verdicts.push_back(check_ge("traveling wave pressure order (min)", min_or_zero(tw_orders), th.min_order));

  // Commutation rule. The stencils commute exactly on fields linear or
  // quadratic in z_n, so z_n sin(z') only shows round-off; the order is
  // measured on sin(z_n) sin(z') instead.
  std::vector<double> comm_errors;
  double comm_exact = 0.0;
  double comm_quadratic = 0.0;
  nlohmann::json comm_rows = nlohmann::json::array();
  for (int l = 0; l < config.levels; ++l) {
    const int n = 16 << l;
    const auto g = HalfSpaceGrid::two_d(4.0, n, 2.0 * M_PI, n);
    const double sigma = params.sigma();
    const double exact = check_commutation(
        ScalarField::from_function(g, [](double zt, double zn) { return zn * std::sin(zt); }), sigma);
    const double quadratic = check_commutation(
        ScalarField::from_function(g, [](double, double zn) { return 0.5 * zn * zn - 2.0 * zn + 1.0; }), sigma);
    comm_errors.push_back(check_commutation(
        ScalarField::from_function(g, [](double zt, double zn) { return std::sin(zn) * std::sin(zt); }), sigma));
    comm_exact = std::max(comm_exact, exact);
    comm_quadratic = std::max(comm_quadratic, quadratic);
    comm_rows.push_back({{"cells", n}, {"defect_zn_sin", exact}, {"defect_quadratic", quadratic},
                         {"defect_sin_sin", comm_errors.back()}});
  }
  const auto comm_orders = orders_of(comm_errors);
  out.verdicts.push_back(check_le("commutation defect, z_n-quadratic", comm_quadratic, 1e-12));
  out.verdicts.push_back(check_le("commutation defect, z_n sin(z') (round-off)", comm_exact, 1e-10));
  out.verdicts.push_back(check_ge("commutation defect order, sin(z_n) sin(z') (min)", min_or_zero(comm_orders), 1.9));

  // Hodograph round trip on a smooth monotone pressure.
  std::vector<double> rt_errors;
  for (int l = 0; l < config.levels; ++l) {
    const int n = 64 << l;
    const auto yg = HalfSpaceGrid::two_d(4.0, n, 2.0 * M_PI, 8, -1.0);
    const auto xg = HalfSpaceGrid::two_d(2.5, n, 2.0 * M_PI, 8);
    const auto g = ScalarField::from_function(yg, [](double yt, double y) {
      return y > 0.0 ? y * (1.0 + 0.1 * std::sin(yt) * std::exp(-y)) : 0.0;
    });
    const auto back = hodograph_inverse(hodograph(g, xg), yg);
    double err = 0.0;
    for (int j = 0; j < yg.n_tangential(); ++j) {
      for (int i = 0; i < yg.n_normal(); ++i) {
        const double y = yg.normal_center(i);
        // away from the first cells above the front, where the kink of g sits inside a cell
        if (y > 0.5 && y < 1.5) err = std::max(err, std::abs(back(j, i) - g(j, i)));
      }
    }
    rt_errors.push_back(err);
  }
  const auto rt_orders = orders_of(rt_errors);
  out.verdicts.push_back(check_ge("hodograph round trip order (min)", min_or_zero(rt_orders), 1.9));

  // Conservation for a compactly supported bump.
  const auto g = config.dim == 2 ? HalfSpaceGrid::two_d(2.0, 32, 4.0, 32, -2.0)
                                 : HalfSpaceGrid::one_d(2.0, 64, -2.0);
  DatumSpec bump;
  bump.family = "radial_bump";
  bump.radius = 1.0;
  DirectSolverConfig dc;
  dc.top = TopCondition::NoFlux;
  const auto mass = solve_density(lab_density_datum(bump, params, g), 0.05, params, dc);
  out.verdicts.push_back(check_le("relative mass drift", mass.relative_mass_drift(), th.mass_drift));

  out.report = {{"config", config.to_json()},
                {"traveling_wave", {{"levels", tw_rows}, {"orders", tw_orders}}},
                {"commutation", {{"levels", comm_rows}, {"orders", comm_orders}}},
                {"hodograph_round_trip", {{"errors", rt_errors}, {"orders", rt_orders}}},
                {"mass_drift", mass.relative_mass_drift()}};
  return out;
}

ExperimentResult run_norms(const ExperimentConfig& config) {
  config.validate(true);
  const ModelParams params = config.params();
  const auto grid = config.perturbation_grid();
  const auto w = solve_perturbation_family(config, config.datum, grid);
  FieldSequence nseq;
  for (const auto& f : w) nseq.push_back(nonlinearity_field(f, params, config.perturbation.form));
  const auto xr = x_norm(w, config.q, config.T, config.lattice);
  const auto yr = y_norm(nseq, config.q, config.T, config.lattice);

  // Oracles on a 1D grid fine enough at the boundary for the analytic value of ||1||_Y.
  const auto og = HalfSpaceGrid::one_d(1.0, 256);
  FieldSequence zeros;
  FieldSequence ones;
  FieldSequence scaled;
  const double lambda = -2.5;
  for (double t : w.times()) {
    zeros.push_back(ScalarField::zeros(og, t));
    ones.push_back(ScalarField::from_function(og, [](double, double) { return 1.0; }, t));
  }
  for (const auto& f : w) {
    std::vector<double> v(f.values().begin(), f.values().end());
    for (double& x : v) x *= lambda;
    scaled.push_back(ScalarField(f.grid(), std::move(v), f.time()));
  }
  const double zero_x = x_norm(zeros, config.q, config.T, config.lattice).x_total();
  const double zero_y = y_norm(zeros, config.q, config.T, config.lattice).y_total();
  const double one_y = y_norm(ones, config.q, config.T, config.lattice).y_total();
  const double scaled_x = x_norm(scaled, config.q, config.T, config.lattice).x_total();
  const double homogeneity =
      xr.x_total() > 0.0 ? std::abs(scaled_x - std::abs(lambda) * xr.x_total()) / (std::abs(lambda) * xr.x_total())
                         : 0.0;

  ExperimentResult out;
  out.experiment = "norms";
  out.report = {{"config", config.to_json()},
                {"x_norm_w", xr.to_json()},
                {"y_norm_N", yr.to_json()},
                {"oracles",
                 {{"zero_x", zero_x}, {"zero_y", zero_y}, {"one_y", one_y},
                  {"homogeneity_relative_error", homogeneity}}}};
  out.verdicts.push_back(check_le("||0||_X + ||0||_Y", zero_x + zero_y, 0.0));
  out.verdicts.push_back(check_le("| ||1||_Y - 1 |", std::abs(one_y - 1.0), config.thresholds.y_one_tolerance));
  out.verdicts.push_back(check_le("homogeneity relative error", homogeneity, 1e-12));
  out.verdicts.push_back(check_le("report finite", std::isfinite(xr.x_total() + yr.y_total()) ? 0.0 : 1.0, 0.0));
  return out;
}

}  // namespace dnwave
