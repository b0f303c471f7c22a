#include "dnwave/model.hpp"

#include <cmath>
#include <sstream>

#include "dnwave/error.hpp"

namespace dnwave {

namespace {

double positive_part(double x) { return x > 0.0 ? x : 0.0; }

// Derivatives of R_q(a, b) = ((1+a^2)/(1+b)^2)^{q/2} with respect to a = d_t w, b = d_n w.
struct RestDerivatives {
  double value;
  double d_a;
  double d_b;
};

RestDerivatives rest_with_derivatives(double a, double b, double q) {
  const double r = rest_q(a, b, q);
  return {r, q * a / (1.0 + a * a) * r, -q / (1.0 + b) * r};
}

}  // namespace

ModelParams::ModelParams(double m, double p) : m_(m), p_(p) {
  if (!std::isfinite(m) || !std::isfinite(p)) {
    throw ParameterError("m and p must be finite");
  }
  if (!(p > 1.0)) {
    std::ostringstream os;
    os << "p>1 violated (p=" << p << ")";
    throw ParameterError(os.str());
  }
  if (!(m + p > 3.0)) {
    std::ostringstream os;
    os << "m+p>3 violated (m=" << m << ", p=" << p << ")";
    throw ParameterError(os.str());
  }
  const double excess = m + p - 3.0;
  kappa_ = excess / (p - 1.0);
  q_exp_ = (m - 1.0) / (p - 1.0) + 1.0;
  sigma_ = (2.0 - m) / excess;
  wave_speed_ = std::pow((p - 1.0) / excess, p - 1.0);
  flux_factor_ = std::pow(q_exp_, 1.0 - p);
  if (!(sigma_ > -1.0) || !(kappa_ > 0.0) || !(q_exp_ > 1.0 / (p - 1.0))) {
    throw ParameterError("derived constants out of range");
  }
}

std::string ModelParams::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << "m=" << m_ << " p=" << p_ << " kappa=" << kappa_ << " q=" << q_exp_
     << " sigma=" << sigma_ << " V=" << wave_speed_;
  return os.str();
}

double Jet::gradient_norm() const { return std::hypot(w_t, w_n); }

double Jet::hessian_norm() const {
  return std::sqrt(w_tt * w_tt + 2.0 * w_tn * w_tn + w_nn * w_nn);
}

Jet Jet::operator+(const Jet& o) const {
  return {z_n, value + o.value, w_t + o.w_t, w_n + o.w_n,
          w_tt + o.w_tt, w_tn + o.w_tn, w_nn + o.w_nn};
}

Jet Jet::operator*(double s) const {
  return {z_n, value * s, w_t * s, w_n * s, w_tt * s, w_tn * s, w_nn * s};
}

double traveling_wave_density(double tau, double y_n, const ModelParams& params) {
  const double base = positive_part(y_n + tau * params.wave_speed());
  if (base == 0.0) return 0.0;
  return std::pow(base, 1.0 / params.kappa());
}

double traveling_wave_pressure(double tau, double y_n, const ModelParams& params) {
  return positive_part(y_n + tau * params.wave_speed());
}

double stationary_pressure(double y_n) { return positive_part(y_n); }

double rest_q(double grad_tangential, double d_n, double q) {
  const double denom = 1.0 + d_n;
  if (denom == 0.0) {
    throw DegenerateJetError("R_q has a pole at d_n w = -1");
  }
  const double ratio = (1.0 + grad_tangential * grad_tangential) / (denom * denom);
  return std::pow(ratio, 0.5 * q);
}

void require_admissible(const Jet& jet) {
  if (!(1.0 + jet.w_n > 0.1)) {
    std::ostringstream os;
    os << "degenerate jet: 1 + d_n w = " << 1.0 + jet.w_n << " <= 0.1 at z_n = " << jet.z_n;
    throw DegenerateJetError(os.str());
  }
}

double nonlinearity_displayed(const Jet& jet, const ModelParams& params) {
  require_admissible(jet);
  const double p = params.p();
  const double z = jet.z_n;
  const double lin = (p - 1.0) / (params.m() + p - 3.0);

  const RestDerivatives r_pm2 = rest_with_derivatives(jet.w_t, jet.w_n, p - 2.0);
  const double r_p = rest_q(jet.w_t, jet.w_n, p);
  const double r_2 = rest_q(jet.w_t, jet.w_n, 2.0);

  const double dt_r_pm2 = r_pm2.d_a * jet.w_tt + r_pm2.d_b * jet.w_tn;
  const double dn_r_pm2 = r_pm2.d_a * jet.w_tn + r_pm2.d_b * jet.w_nn;

  double sum = (r_pm2.value - 1.0) * z * jet.w_tt;
  sum += (r_p - 1.0) * z * jet.w_nn;
  sum += lin * (1.0 - r_p) * jet.w_n;
  sum += lin * (1.0 - r_p - p * jet.w_n);
  sum -= 2.0 * z * r_pm2.value * jet.w_t * jet.w_tn / (1.0 + jet.w_n);
  sum += z * dt_r_pm2 * jet.w_t;
  sum -= z * r_2 * (dn_r_pm2 + (p - 2.0) * jet.w_nn);
  return sum / (p - 1.0);
}

Jet zeta_jet_from_perturbation(const Jet& w, const ModelParams& params) {
  const double s = std::sqrt(params.p() - 1.0);
  Jet zeta;
  zeta.z_n = w.z_n;
  zeta.value = w.z_n + w.value;
  zeta.w_t = s * w.w_t;
  zeta.w_n = 1.0 + w.w_n;
  zeta.w_tt = s * s * w.w_tt;
  zeta.w_tn = s * w.w_tn;
  zeta.w_nn = w.w_nn;
  return zeta;
}

double zeta_rhs(const Jet& zeta, const ModelParams& params, ZetaForm form) {
  const double zn = zeta.w_n;
  if (!(zn > 0.0)) {
    throw DegenerateJetError("transformed pressure equation needs d_n zeta > 0");
  }
  const double p = params.p();
  const double excess = params.m() + p - 3.0;
  const double x = zeta.z_n;
  const double zt = zeta.w_t;

  // A = (1 + |grad' zeta|^2) / (d_n zeta)^2 is |grad g|^2 in the original variables.
  const double top = 1.0 + zt * zt;
  const double a = top / (zn * zn);
  const double pw = std::pow(a, 0.5 * (p - 2.0));

  const double dt_a = 2.0 * zt * zeta.w_tt / (zn * zn) - 2.0 * top * zeta.w_tn / (zn * zn * zn);
  const double dn_a = 2.0 * zt * zeta.w_tn / (zn * zn) - 2.0 * top * zeta.w_nn / (zn * zn * zn);
  const double dpw = 0.5 * (p - 2.0) * pw / a;
  const double dt_pw = dpw * dt_a;
  const double dn_pw = dpw * dn_a;

  const double normal_weight = form == ZetaForm::Derived ? a * zn : a;

  double rhs = x * pw * (zeta.w_tt - 2.0 * zt * zeta.w_tn / zn + a * zeta.w_nn) / (p - 1.0);
  rhs += x * zt * dt_pw / (p - 1.0);
  rhs -= x * normal_weight * dn_pw / (p - 1.0);
  rhs -= std::pow(a, 0.5 * p) * zn / excess;
  rhs += 1.0 / excess;
  return rhs;
}

double nonlinearity_derived(const Jet& jet, const ModelParams& params) {
  require_admissible(jet);
  const Jet zeta = zeta_jet_from_perturbation(jet, params);
  return zeta_rhs(zeta, params, ZetaForm::Derived) + apply_L_sigma(jet, params.sigma());
}

double nonlinearity(const Jet& jet, const ModelParams& params, NonlinearityForm form) {
  return form == NonlinearityForm::Displayed ? nonlinearity_displayed(jet, params)
                                             : nonlinearity_derived(jet, params);
}

double nonlinearity_bound_rhs(const Jet& jet) {
  const double g = jet.gradient_norm();
  return g * g + jet.z_n * g * jet.hessian_norm();
}

double apply_L_sigma(const Jet& jet, double sigma) {
  return -jet.z_n * jet.laplacian() - (sigma + 1.0) * jet.w_n;
}

}  // namespace dnwave
