#include "dnwave/perturbation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dnwave/error.hpp"

namespace dnwave {

TransformMeta TransformMeta::from(const ModelParams& params) {
  // t = V tau turns the wave-frame pressure equation into unit speed; the
  // second rescaling by (m+p-3) normalises the transformed pressure equation.
  return {(params.m() + params.p() - 3.0) * params.wave_speed(), std::sqrt(params.p() - 1.0)};
}

void PerturbationConfig::validate() const {
  if (!(cfl_factor > 0.0 && cfl_factor <= 1.0)) throw ParameterError("cfl_factor must lie in (0, 1]");
  if (!(max_gradient > 0.0 && max_gradient < 0.9)) {
    throw ParameterError("max_gradient must lie in (0, 0.9)");
  }
}

ScalarField apply_L_sigma(const ScalarField& w, double sigma, TopBoundary top) {
  const auto& g = w.grid();
  const std::vector<Jet> js = jets(w, top);
  std::vector<double> out(js.size());
  for (std::size_t k = 0; k < js.size(); ++k) {
    Jet jet = js[k];
    jet.z_n -= g.z_min();
    out[k] = apply_L_sigma(jet, sigma);
  }
  return ScalarField(g, std::move(out), w.time());
}

double check_commutation(const ScalarField& w, double sigma, int margin) {
  const auto& g = w.grid();
  const ScalarField lw = apply_L_sigma(w, sigma);
  const ScalarField dn_lw = gradient(lw).n;
  const ScalarField dn_w = gradient(w).n;
  const ScalarField l_dn_w = apply_L_sigma(dn_w, sigma + 1.0);
  const ScalarField lap_t = hessian(w).tt;
  double worst = 0.0;
  for (int j = 0; j < g.n_tangential(); ++j) {
    for (int i = margin; i < g.n_normal() - margin; ++i) {
      worst = std::max(worst, std::abs(dn_lw(j, i) - l_dn_w(j, i) + lap_t(j, i)));
    }
  }
  return worst;
}

namespace {

void require_half_space(const HalfSpaceGrid& g) {
  if (g.z_min() != 0.0) throw GridError("perturbation fields live on {z_n > 0}; z_min must be 0");
}

}  // namespace

ScalarField nonlinearity_field(const ScalarField& w, const ModelParams& params,
                               NonlinearityForm form, TopBoundary top) {
  require_half_space(w.grid());
  const std::vector<Jet> js = jets(w, top);
  std::vector<double> out(js.size());
  for (std::size_t k = 0; k < js.size(); ++k) out[k] = nonlinearity(js[k], params, form);
  return ScalarField(w.grid(), std::move(out), w.time());
}

namespace {

std::vector<double> rhs_values(const ScalarField& w, const ModelParams& params,
                               const PerturbationConfig& config) {
  const auto& g = w.grid();
  const std::vector<Jet> js = jets(w, TopBoundary::Mirror);
  std::vector<double> out(js.size());
  const double sigma = params.sigma();
  for (std::size_t k = 0; k < js.size(); ++k) {
    const Jet& jet = js[k];
    if (!(jet.gradient_norm() < config.max_gradient)) {
      std::ostringstream os;
      os << "gradient too large: |grad w| = " << jet.gradient_norm() << " at cell (j="
         << k / g.n_normal() << ", i=" << k % g.n_normal() << "), t=" << w.time();
      throw DegenerateJetError(os.str());
    }
    out[k] = nonlinearity(jet, params, config.form) - apply_L_sigma(jet, sigma);
  }
  return out;
}

ScalarField euler_update(const ScalarField& w, const std::vector<double>& rhs, double dt) {
  const auto& g = w.grid();
  const auto v = w.values();
  std::vector<double> next(v.size());
  for (std::size_t k = 0; k < v.size(); ++k) {
    next[k] = v[k] + dt * rhs[k];
    if (!std::isfinite(next[k])) {
      std::ostringstream os;
      os << "non-finite perturbation at cell (j=" << k / g.n_normal() << ", i=" << k % g.n_normal()
         << "), t=" << w.time();
      throw NonFiniteError(os.str());
    }
  }
  return ScalarField(g, std::move(next), w.time() + dt);
}

}  // namespace

ScalarField perturbation_rhs(const ScalarField& w, const ModelParams& params,
                             NonlinearityForm form) {
  require_half_space(w.grid());
  PerturbationConfig config;
  config.form = form;
  config.max_gradient = 0.89;
  return ScalarField(w.grid(), rhs_values(w, params, config), w.time());
}

double perturbation_dt_limit(const HalfSpaceGrid& grid) {
  const double h = grid.h_min();
  return h * h / (2.0 * grid.dim() * grid.z_max());
}

ScalarField step_perturbation(const ScalarField& w, double dt, const ModelParams& params,
                              const PerturbationConfig& config) {
  config.validate();
  require_half_space(w.grid());
  const double limit = config.cfl_factor * perturbation_dt_limit(w.grid());
  if (!(dt >= 0.0) || dt > limit * (1.0 + 1e-9)) {
    std::ostringstream os;
    os << "CFL violated: dt=" << dt << " exceeds cfl_factor*h^2/(2 n z_max)=" << limit;
    throw CflError(os.str());
  }
  return euler_update(w, rhs_values(w, params, config), dt);
}

FieldSequence solve_perturbation(const ScalarField& w0, double t_end, const ModelParams& params,
                                 const PerturbationConfig& config) {
  config.validate();
  require_half_space(w0.grid());
  if (!(t_end > w0.time())) throw ParameterError("t_end must exceed the initial time");

  std::vector<double> targets;
  for (double t : config.snapshot_times) {
    if (t > w0.time() && t < t_end) targets.push_back(t);
  }
  targets.push_back(t_end);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  const double limit = config.cfl_factor * perturbation_dt_limit(w0.grid());
  FieldSequence seq;
  ScalarField w = w0;
  seq.push_back(w);
  for (double target : targets) {
    while (w.time() < target) {
      const double remaining = target - w.time();
      const bool last = limit >= remaining * (1.0 - 1e-12);
      const double dt = last ? remaining : limit;
      w = euler_update(w, rhs_values(w, params, config), dt);
      if (last) w = w.with_time(target);
    }
    seq.push_back(w);
  }
  return seq;
}

std::vector<double> geometric_times(double t_first, double t_end, int per_decade) {
  if (!(t_first > 0.0 && t_end > t_first) || per_decade < 1) {
    throw ParameterError("geometric_times needs 0 < t_first < t_end and per_decade >= 1");
  }
  const int count = static_cast<int>(std::ceil(std::log10(t_end / t_first) * per_decade));
  std::vector<double> t;
  for (int k = 0; k <= count; ++k) {
    t.push_back(t_first * std::pow(t_end / t_first, static_cast<double>(k) / count));
  }
  t.back() = t_end;
  return t;
}

ScalarField zeta_of(const ScalarField& w, const ModelParams& params) {
  require_half_space(w.grid());
  const auto& gz = w.grid();
  const HalfSpaceGrid gx = gz.with_tangential_scale(1.0 / std::sqrt(params.p() - 1.0));
  std::vector<double> out(gx.size());
  for (int j = 0; j < gx.n_tangential(); ++j) {
    for (int i = 0; i < gx.n_normal(); ++i) out[gx.index(j, i)] = gx.normal_center(i) + w(j, i);
  }
  return ScalarField(gx, std::move(out), w.time());
}

ScalarField perturbation_of(const ScalarField& zeta, const ModelParams& params) {
  require_half_space(zeta.grid());
  const auto& gx = zeta.grid();
  const HalfSpaceGrid gz = gx.with_tangential_scale(std::sqrt(params.p() - 1.0));
  std::vector<double> out(gz.size());
  for (int j = 0; j < gz.n_tangential(); ++j) {
    for (int i = 0; i < gz.n_normal(); ++i) out[gz.index(j, i)] = zeta(j, i) - gz.normal_center(i);
  }
  return ScalarField(gz, std::move(out), zeta.time());
}

namespace {

std::vector<double> zeta_rhs_values(const ScalarField& zeta, const ModelParams& params,
                                    ZetaForm form) {
  const std::vector<Jet> js = jets(zeta, TopBoundary::OneSided);
  std::vector<double> out(js.size());
  for (std::size_t k = 0; k < js.size(); ++k) out[k] = zeta_rhs(js[k], params, form);
  return out;
}

}  // namespace

FieldSequence residual_transformed(const FieldSequence& zeta, const ModelParams& params,
                                   const TransformMeta& meta, ZetaForm form, TimeAxis axis) {
  if (zeta.size() < 2) throw SnapshotDensityError("residual_transformed needs two snapshots");
  require_half_space(zeta.grid());
  const auto& g = zeta.grid();
  for (const auto& f : zeta) {
    const ScalarField dn = gradient(f).n;
    for (std::size_t k = 0; k < g.size(); ++k) {
      if (!(dn.values()[k] > 0.1)) {
        std::ostringstream os;
        os << "d_n zeta = " << dn.values()[k] << " <= 0.1 at cell (j=" << k / g.n_normal()
           << ", i=" << k % g.n_normal() << "), t=" << f.time();
        throw DegenerateJetError(os.str());
      }
    }
  }
  const double scale = axis == TimeAxis::Lab ? meta.time_scale_total : 1.0;
  FieldSequence out;
  std::vector<double> prev = zeta_rhs_values(zeta[0], params, form);
  for (std::size_t k = 0; k + 1 < zeta.size(); ++k) {
    const ScalarField& a = zeta[k];
    const ScalarField& b = zeta[k + 1];
    const std::vector<double> next = zeta_rhs_values(b, params, form);
    const double ds = (b.time() - a.time()) * scale;
    std::vector<double> r(g.size());
    for (std::size_t c = 0; c < r.size(); ++c) {
      r[c] = (b.values()[c] - a.values()[c]) / ds - 0.5 * (prev[c] + next[c]);
    }
    out.push_back(ScalarField(g, std::move(r), 0.5 * (a.time() + b.time())));
    prev = next;
  }
  return out;
}

std::vector<ResidualNorm> residual_norms(const FieldSequence& residual, int top_margin) {
  std::vector<ResidualNorm> out;
  for (const auto& f : residual) {
    const auto& g = f.grid();
    ResidualNorm r;
    r.time = f.time();
    double sum = 0.0;
    for (int j = 0; j < g.n_tangential(); ++j) {
      for (int i = 0; i < g.n_normal() - top_margin; ++i) {
        const double v = f(j, i);
        r.max_residual = std::max(r.max_residual, std::abs(v));
        sum += v * v;
      }
    }
    r.l2_residual = std::sqrt(sum * g.cell_volume());
    out.push_back(r);
  }
  return out;
}

}  // namespace dnwave
