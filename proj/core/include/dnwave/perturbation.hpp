#pragma once

// The perturbation equation d_t w + L_sigma w = N[w] on the fixed half-space
// {z_n > 0}, the transformed pressure equation for zeta = x_n + w, and the
// commutation rule of L_sigma.

#include <vector>

#include "dnwave/grid.hpp"
#include "dnwave/model.hpp"

namespace dnwave {

/// Rescalings that connect the lab frame to the perturbation variables:
/// perturbation time s = time_scale_total * tau (tau the lab time of the
/// density equation) and tangential coordinate z' = tangential_scale * x'.
struct TransformMeta {
  double time_scale_total = 1.0;
  double tangential_scale = 1.0;

  static TransformMeta from(const ModelParams& params);
};

struct PerturbationConfig {
  double cfl_factor = 0.5;
  NonlinearityForm form = NonlinearityForm::Derived;
  /// Steps are refused once |grad w| reaches this bound anywhere.
  double max_gradient = 0.5;
  /// Extra snapshot times in (0, t_end); 0 and t_end are always stored.
  std::vector<double> snapshot_times;

  void validate() const;
};

/// -z_n (discrete Laplacian) - (sigma+1) (discrete d_n), cell-centred.
ScalarField apply_L_sigma(const ScalarField& w, double sigma,
                          TopBoundary top = TopBoundary::OneSided);

/// max |d_n(L_sigma w) - L_{sigma+1}(d_n w) + Delta' w| over cells at least
/// `margin` rows away from both normal boundaries.
double check_commutation(const ScalarField& w, double sigma, int margin = 2);

/// Pointwise N[w] with the zero-normal-derivative top used by the solver.
ScalarField nonlinearity_field(const ScalarField& w, const ModelParams& params,
                               NonlinearityForm form, TopBoundary top = TopBoundary::Mirror);

/// Right-hand side N[w] - L_sigma w of the perturbation equation.
ScalarField perturbation_rhs(const ScalarField& w, const ModelParams& params,
                             NonlinearityForm form);

/// Forward-Euler stability bound h_min^2 / (2 n z_max).
double perturbation_dt_limit(const HalfSpaceGrid& grid);

ScalarField step_perturbation(const ScalarField& w, double dt, const ModelParams& params,
                              const PerturbationConfig& config);

FieldSequence solve_perturbation(const ScalarField& w0, double t_end, const ModelParams& params,
                                 const PerturbationConfig& config);

/// `per_decade` geometrically spaced times from t_first to t_end inclusive.
std::vector<double> geometric_times(double t_first, double t_end, int per_decade);

/// zeta(x) = x_n + w((p-1)^{1/2} x', x_n) on the grid with tangential extent divided by (p-1)^{1/2}.
ScalarField zeta_of(const ScalarField& w, const ModelParams& params);
/// Inverse of zeta_of.
ScalarField perturbation_of(const ScalarField& zeta, const ModelParams& params);

enum class TimeAxis { Perturbation, Lab };

/// Residual d_t zeta - F(zeta) of the transformed pressure equation between
/// consecutive snapshots (trapezoidal in time, midpoint time stamps). Lab-time
/// sequences are converted with meta.time_scale_total.
FieldSequence residual_transformed(const FieldSequence& zeta, const ModelParams& params,
                                   const TransformMeta& meta, ZetaForm form = ZetaForm::Derived,
                                   TimeAxis axis = TimeAxis::Perturbation);

struct ResidualNorm {
  double time = 0.0;
  double max_residual = 0.0;
  double l2_residual = 0.0;
};

/// Max and L2 norms per residual snapshot over rows [0, n_normal - top_margin).
std::vector<ResidualNorm> residual_norms(const FieldSequence& residual, int top_margin = 0);

}  // namespace dnwave
