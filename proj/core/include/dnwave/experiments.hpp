#pragma once

// Reproducible experiments wiring solvers, transforms and norms together.
// Each run returns a JSON report plus pass/fail verdicts against
// configurable thresholds. The thresholds are calibrations of this code.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "dnwave/config.hpp"
#include "dnwave/direct_solver.hpp"
#include "dnwave/model.hpp"
#include "dnwave/norms.hpp"
#include "dnwave/perturbation.hpp"

namespace dnwave {

/// Named initial data.
///  zero        w = 0
///  sine_bump   w = eps sin(k z') z_n exp(-z_n)          (perturbation variables)
///  sine_gauss  w = eps sin(k z') z_n exp(-z_n^2)        (perturbation variables)
///  tw          traveling wave density (lab frame)
///  tw_sine     lab pressure y_n + eps sin(k y') y_n exp(-y_n^2) on y_n > 0
///  radial_bump density (1 - |y - c|^2 / R^2)_+^{1/kappa}, compact support
struct DatumSpec {
  std::string family = "sine_bump";
  double epsilon = 0.05;
  /// Tangential wave number k.
  double wavenumber = 1.0;
  double radius = 1.0;

  bool is_perturbation_family() const;
  bool is_lab_family() const;
};

/// Perturbation datum w0(z', z_n) of a perturbation family. On one-dimensional
/// grids the tangential factor is dropped.
std::function<double(double, double)> perturbation_datum(const DatumSpec& datum, int dim);
/// Lab density datum rho0 sampled on `grid`. Perturbation families are mapped
/// to the lab frame through the graph equation, solved exactly per cell by
/// bisection, so that both formulations start from the same state.
ScalarField lab_density_datum(const DatumSpec& datum, const ModelParams& params,
                              const HalfSpaceGrid& grid);

struct Thresholds {
  double amplification = 5.0;       // stability: sup ||grad g - e_n|| <= amplification * eps
  double quadratic_variation = 3.0;  // nonlinearity ratio max/min
  double min_order = 0.9;           // refinement orders
  double refinement_factor = 2.0;   // decay bound change under refinement
  double linearity_tolerance = 0.25;
  double mass_drift = 1e-10;
  double isometry_band = 0.15;
  double cross_isometry_band = 0.1;
  double y_one_tolerance = 0.1;
};

struct ExperimentConfig {
  std::string experiment = "stability";
  double m = 2.0;
  double p = 2.0;
  /// 1 or 2.
  int dim = 2;
  int n_normal = 64;
  int n_tangential = 32;
  double tangential_extent = 6.283185307179586;
  /// Normal extent of the perturbation (z) grid.
  double z_max = 8.0;
  /// Normal range of the lab (y) grid.
  double lab_bottom = -1.5;
  double lab_top = 4.0;
  DatumSpec datum;
  double T = 1.0;
  DirectSolverConfig direct;
  PerturbationConfig perturbation;
  double q = 8.0;
  NormLattice lattice;
  /// Snapshots per decade of geometric time grids.
  int snapshots_per_decade = 12;
  double t_first = 0.01;
  int levels = 3;
  /// Cross-check comparison band x_n in [cross_x_min, z_max / 2].
  double cross_x_min = 0.5;
  /// Stability: cells with pressure below front_layer * h_normal are treated as the front layer.
  double front_layer = 3.0;
  std::vector<double> epsilons{0.01, 0.02, 0.05, 0.1};
  std::size_t random_samples = 100000;
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 42;
  bool write_fields = false;
  Thresholds thresholds;

  /// Reads every key (see README for the schema); unknown keys raise ConfigError.
  static ExperimentConfig from_map(const ConfigMap& map);
  ModelParams params() const { return ModelParams(m, p); }
  /// Throws ParameterError/ConfigError; checks q against max{2(n+1), 1/(1+sigma)} when norms are used.
  void validate(bool norms_requested) const;
  HalfSpaceGrid perturbation_grid() const;
  HalfSpaceGrid lab_grid() const;
  nlohmann::json to_json() const;
};

struct Verdict {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  /// "<=" or ">=".
  std::string relation = "<=";
  bool pass = false;

  nlohmann::json to_json() const;
};

Verdict check_le(std::string name, double value, double threshold);
Verdict check_ge(std::string name, double value, double threshold);

struct ExperimentResult {
  std::string experiment;
  nlohmann::json report;
  std::vector<Verdict> verdicts;

  bool passed() const;
  nlohmann::json verdict_json() const;
};

/// Lipschitz distance of the pressure to the traveling wave, per snapshot.
struct StabilitySample {
  double tau = 0.0;
  double deviation = 0.0;
};

/// Entry (k, |beta|) of the decay report: t^{k+|beta|} ||d_t^k d^beta grad w(t)||_inf.
struct DecayEntry {
  int k = 0;
  int beta = 0;
  std::vector<double> times;
  std::vector<double> values;
  double sup = 0.0;
  double sup_over_lipschitz = 0.0;
};

struct DecayReport {
  double lipschitz0 = 0.0;
  std::vector<DecayEntry> entries;

  const DecayEntry& entry(int k, int beta) const;
  nlohmann::json to_json() const;
};

/// Decay entries of a stored perturbation sequence over snapshots with t in [t_lo, t_hi].
DecayReport decay_report(const FieldSequence& w, double t_lo, double t_hi);

/// sup of |grad g - e_n| for a lab pressure field over cells whose stencil
/// (the cell and its normal and tangential neighbours) has pressure at least
/// `front_layer` h_normal, i.e. the support minus a discrete front layer of
/// about `front_layer` cells, and away from the top row.
double pressure_deviation(const ScalarField& g, double front_layer);

/// Max of |N| / (|grad w|^2 + z_n |grad w| |grad^2 w|) over `count` random
/// admissible jets (|grad w| <= 0.5, |grad^2 w| <= 5, z_n in [0, 10]).
double random_jet_constant(const ModelParams& params, NonlinearityForm form, std::size_t count,
                           std::uint64_t seed);

/// Perturbation solve with geometric snapshots from config.t_first to config.T.
FieldSequence solve_perturbation_family(const ExperimentConfig& config, const DatumSpec& datum,
                                        const HalfSpaceGrid& grid);

/// Plain solves that write CSV snapshots to out_dir/fields and report traces.
ExperimentResult run_simulate_direct(const ExperimentConfig& config);
ExperimentResult run_simulate_perturbation(const ExperimentConfig& config);

ExperimentResult run_stability(const ExperimentConfig& config);
ExperimentResult run_decay(const ExperimentConfig& config);
ExperimentResult run_nonlinearity_ratio(const ExperimentConfig& config);
ExperimentResult run_cross_check(const ExperimentConfig& config);
ExperimentResult run_convergence(const ExperimentConfig& config);
ExperimentResult run_norms(const ExperimentConfig& config);

/// Cross-check at one resolution: sup of the difference between the
/// hodograph of the direct solve and zeta of the transformed solve, over the
/// band cross_x_min <= x_n <= z_max / 2 and over all x_n <= z_max / 2. The
/// full value includes the first row, which sits inside the discrete front
/// layer of the direct scheme (an O(h) error whose constant depends on where
/// the front sits inside its cell).
struct CrossCheckLevel {
  int n_normal = 0;
  int n_tangential = 0;
  double discrepancy = 0.0;
  double discrepancy_full = 0.0;
  RatioRange isometry;
};
CrossCheckLevel cross_check_level(const ExperimentConfig& config, int n_normal, int n_tangential);

/// Sup pressure error of the 1D traveling-wave ladder at time T.
struct LadderLevel {
  int cells = 0;
  double error = 0.0;
  double seconds = 0.0;
  double mass_drift = 0.0;
};
std::vector<LadderLevel> traveling_wave_ladder(const ModelParams& params, double T,
                                               const std::vector<int>& cells);

/// Writes `<experiment>.json` (report and verdicts) into config.out_dir.
void write_result(const ExperimentResult& result, const std::filesystem::path& out_dir);

}  // namespace dnwave
