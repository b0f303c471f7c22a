#pragma once

// Explicit finite-volume solver for the doubly nonlinear density equation
//
//   d_tau rho = div(rho^{m-1} |grad rho|^{p-2} grad rho)
//             = q^{1-p} div(|grad u|^{p-2} grad u),   u = rho^q,
//
// in the lab frame, plus pressure extraction, frame shifts, support
// detection and a post-hoc residual.

#include <limits>
#include <optional>
#include <vector>

#include "dnwave/grid.hpp"
#include "dnwave/model.hpp"

namespace dnwave {

enum class Frame { Lab, TravelingWave };

/// Boundary condition at the top of the slab. `TravelingWave` fills the
/// ghost row with the exact traveling-wave density at the current time.
/// The bottom is always a no-flux boundary.
enum class TopCondition { NoFlux, TravelingWave };

struct DirectSolverConfig {
  double cfl_factor = 0.5;
  /// Regularisation of |grad u|^{p-2}; defaults to 0 for p >= 2 and 1e-8 for p < 2.
  std::optional<double> delta;
  double positivity_threshold = 1e-10;
  /// Frame of the returned snapshots. The time stepping itself is always done in the lab frame.
  Frame frame = Frame::Lab;
  TopCondition top = TopCondition::NoFlux;
  /// Extra snapshot times in (0, t_end); 0 and t_end are always stored.
  std::vector<double> snapshot_times;

  void validate(const ModelParams& params) const;
  double regularization(const ModelParams& params) const;
};

struct StepDiagnostics {
  double clipped_mass = 0.0;
  int clipped_cells = 0;
};

struct SolveResult {
  FieldSequence sequence;
  /// Total mass before the first step and after every step.
  std::vector<double> mass_trace;
  std::vector<double> dt_trace;
  /// Support boundary per stored snapshot (lab frame), one entry per tangential column.
  std::vector<std::vector<double>> boundary_trace;
  double clipped_mass = 0.0;
  int clipped_cells = 0;

  int steps() const { return static_cast<int>(dt_trace.size()); }
  double relative_mass_drift() const;
};

/// Largest forward-Euler step allowed by the CFL bound
/// cfl_factor * h_min^2 / (2 n D_max); +inf when the diffusivity vanishes.
double stable_dt(const ScalarField& rho, const ModelParams& params,
                 const DirectSolverConfig& config);

/// Discrete divergence of the face fluxes, in storage order.
std::vector<double> flux_divergence(const ScalarField& rho, const ModelParams& params,
                                    const DirectSolverConfig& config);

/// One conservative forward-Euler step; rho.time() is the lab time tau.
ScalarField step_density(const ScalarField& rho, double dt, const ModelParams& params,
                         const DirectSolverConfig& config, StepDiagnostics* diagnostics = nullptr);

SolveResult solve_density(const ScalarField& rho0, double t_end, const ModelParams& params,
                          const DirectSolverConfig& config);

/// Pointwise rho^kappa.
ScalarField pressure_of(const ScalarField& rho, const ModelParams& params);

/// v(tau, y) = rho(tau, y', y_n - V tau) by linear interpolation.
FieldSequence to_wave_frame(const FieldSequence& seq, const ModelParams& params,
                            double threshold = 1e-10);
/// rho(tau, y) = v(tau, y', y_n + V tau).
FieldSequence from_wave_frame(const FieldSequence& seq, const ModelParams& params,
                              double threshold = 1e-10);
/// out(y) = field(y', y_n + offset). Values below the slab are taken as zero
/// provided the bottom row is below `threshold`; values above are linearly extrapolated.
ScalarField shift_normal(const ScalarField& field, double offset, double threshold);

inline constexpr double kNoBoundary = std::numeric_limits<double>::infinity();

/// For each tangential column, the lowest normal coordinate where the field
/// exceeds `threshold`, refined by linear interpolation; kNoBoundary if none.
std::vector<double> support_boundary(const ScalarField& field, double threshold);

/// 1 for cells whose stencil neighbours all exceed `threshold`, 0 otherwise.
/// The first and last normal rows are never interior.
std::vector<char> support_interior(const ScalarField& field, double threshold);

/// Residual d_tau rho - div(flux) between consecutive snapshots (trapezoidal
/// in time), on support-interior cells; zero elsewhere. Times are midpoints.
FieldSequence residual_density(const FieldSequence& seq, const ModelParams& params,
                               const DirectSolverConfig& config);

}  // namespace dnwave
