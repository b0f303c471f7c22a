#pragma once

// Equation parameters, closed-form reference solutions and pointwise
// evaluation of the perturbation nonlinearity, the degenerate operator
// L_sigma and the transformed (hodograph) pressure equation.

#include <string>

namespace dnwave {

/// Nonlinearity exponents (m, p) of d_tau rho = div(rho^{m-1} |grad rho|^{p-2} grad rho)
/// together with every derived constant. Construction rejects parameters
/// outside the slow diffusion regime p > 1, m + p > 3.
class ModelParams {
 public:
  ModelParams(double m, double p);

  double m() const { return m_; }
  double p() const { return p_; }
  /// Pressure exponent (m+p-3)/(p-1): pressure = density^kappa.
  double kappa() const { return kappa_; }
  /// Exponent q = (m-1)/(p-1) + 1 of the p-Laplacian form d_t rho = Delta_p(rho^q).
  double q_exp() const { return q_exp_; }
  /// sigma = (2-m)/(m+p-3) > -1.
  double sigma() const { return sigma_; }
  /// Traveling wave speed V = ((p-1)/(m+p-3))^{p-1}.
  double wave_speed() const { return wave_speed_; }
  /// q^{1-p}: rho^{m-1}|grad rho|^{p-2} grad rho = q^{1-p} |grad u|^{p-2} grad u, u = rho^q.
  double flux_factor() const { return flux_factor_; }

  std::string describe() const;

 private:
  double m_;
  double p_;
  double kappa_;
  double q_exp_;
  double sigma_;
  double wave_speed_;
  double flux_factor_;
};

/// Pointwise bundle of a field and its first and second derivatives in a
/// half-space with at most one tangential direction (subscript t) and the
/// normal direction (subscript n). For one-dimensional grids all tangential
/// entries are zero.
struct Jet {
  double z_n = 0.0;
  double value = 0.0;
  double w_t = 0.0;
  double w_n = 0.0;
  double w_tt = 0.0;
  double w_tn = 0.0;
  double w_nn = 0.0;

  double gradient_norm() const;
  /// Frobenius norm of the full Hessian (the mixed entry counts twice).
  double hessian_norm() const;
  double laplacian() const { return w_tt + w_nn; }

  Jet operator+(const Jet& other) const;
  Jet operator*(double s) const;
};

double traveling_wave_density(double tau, double y_n, const ModelParams& params);
/// Pressure of the traveling wave in the lab frame, (y_n + V tau)_+.
double traveling_wave_pressure(double tau, double y_n, const ModelParams& params);
/// Pressure of the traveling wave in its own frame, (y_n)_+.
double stationary_pressure(double y_n);

/// R_q = ((1 + |grad' w|^2) / (1 + d_n w)^2)^{q/2}. Throws DegenerateJetError at d_n = -1.
double rest_q(double grad_tangential, double d_n, double q);

/// The perturbation nonlinearity N[w] exactly as displayed, with the
/// derivatives of R_{p-2} expanded by the chain rule.
double nonlinearity_displayed(const Jet& jet, const ModelParams& params);

/// The perturbation nonlinearity obtained by substituting zeta = x_n + w
/// (tangential coordinate rescaled by (p-1)^{1/2}) into the transformed
/// pressure equation derived from the wave-frame pressure equation, i.e.
/// zeta_rhs + L_sigma w. Coincides with nonlinearity_displayed for p = 2.
double nonlinearity_derived(const Jet& jet, const ModelParams& params);

enum class NonlinearityForm { Displayed, Derived };

double nonlinearity(const Jet& jet, const ModelParams& params, NonlinearityForm form);

/// |grad w|^2 + z_n |grad w| |grad^2 w|.
double nonlinearity_bound_rhs(const Jet& jet);

/// L_sigma w = -z_n Delta w - (sigma+1) d_n w.
double apply_L_sigma(const Jet& jet, double sigma);

/// Which version of the transformed pressure equation to evaluate. The
/// displayed version multiplies the d_n R^{(p-2)/2} term by R only; the
/// derived version by R d_n zeta. They agree when p = 2.
enum class ZetaForm { Displayed, Derived };

/// Spatial part F of the transformed pressure equation d_t zeta = F(zeta),
/// written in the coordinates x = (x', x_n) and the twice rescaled time.
/// The jet holds zeta and its derivatives at height x_n = jet.z_n.
double zeta_rhs(const Jet& zeta, const ModelParams& params, ZetaForm form);

/// Converts a jet of the perturbation w(z) into the jet of
/// zeta(x) = x_n + w((p-1)^{1/2} x', x_n).
Jet zeta_jet_from_perturbation(const Jet& w, const ModelParams& params);

/// Reject jets outside the evaluation domain 1 + d_n w > 0.1.
void require_admissible(const Jet& jet);

}  // namespace dnwave
