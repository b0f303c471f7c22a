#include "dnwave/direct_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dnwave/error.hpp"

namespace dnwave {

void DirectSolverConfig::validate(const ModelParams& params) const {
  if (!(cfl_factor > 0.0 && cfl_factor <= 1.0)) throw ParameterError("cfl_factor must lie in (0, 1]");
  if (delta && !(*delta >= 0.0)) throw ParameterError("delta must be >= 0");
  if (!(positivity_threshold > 0.0)) throw ParameterError("positivity_threshold must be > 0");
  if (params.p() < 2.0 && !(regularization(params) > 0.0)) {
    throw ParameterError("p < 2 needs a positive gradient regularization delta");
  }
}

double DirectSolverConfig::regularization(const ModelParams& params) const {
  if (delta) return *delta;
  return params.p() < 2.0 ? 1e-8 : 0.0;
}

double SolveResult::relative_mass_drift() const {
  if (mass_trace.empty() || mass_trace.front() == 0.0) return 0.0;
  double worst = 0.0;
  for (double m : mass_trace) worst = std::max(worst, std::abs(m - mass_trace.front()));
  return worst / std::abs(mass_trace.front());
}

namespace {

// Face fluxes and the resulting divergence for one state.
struct FluxEvaluation {
  std::vector<double> divergence;
  double max_diffusivity = 0.0;
};

class FluxAssembler {
 public:
  FluxAssembler(const ScalarField& rho, const ModelParams& params, const DirectSolverConfig& config)
      : g_(rho.grid()),
        params_(params),
        delta2_(std::pow(config.regularization(params), 2)),
        nn_(g_.n_normal()),
        nt_(g_.n_tangential()) {
    const auto r = rho.values();
    u_.resize(g_.size());
    dudrho_.resize(g_.size());
    for (std::size_t k = 0; k < u_.size(); ++k) {
      u_[k] = power(r[k]);
      dudrho_[k] = derivative(r[k]);
    }
    has_ghost_ = config.top == TopCondition::TravelingWave;
    if (has_ghost_) {
      const double ghost_rho =
          traveling_wave_density(rho.time(), g_.z_max() + 0.5 * g_.h_normal(), params);
      ghost_u_ = power(ghost_rho);
      ghost_dudrho_ = derivative(ghost_rho);
    }
    // Cell-centred transverse differences used at the faces.
    cn_.resize(g_.size());
    ct_.assign(g_.size(), 0.0);
    const double hn = g_.h_normal();
    for (int j = 0; j < nt_; ++j) {
      for (int i = 0; i < nn_; ++i) cn_[g_.index(j, i)] = central_n(j, i, hn);
    }
    if (g_.dim() == 2) {
      const double inv = 1.0 / (2.0 * g_.h_tangential());
      for (int j = 0; j < nt_; ++j) {
        const double* up = &u_[g_.index(g_.wrap(j + 1), 0)];
        const double* um = &u_[g_.index(g_.wrap(j - 1), 0)];
        double* out = &ct_[g_.index(j, 0)];
        for (int i = 0; i < nn_; ++i) out[i] = (up[i] - um[i]) * inv;
      }
    }
  }

  FluxEvaluation evaluate() const {
    FluxEvaluation out;
    out.divergence.assign(g_.size(), 0.0);
    double* div = out.divergence.data();
    const double hn = g_.h_normal();
    const double ht = g_.h_tangential();

    // Normal faces: face i sits below cell i; face 0 is the no-flux bottom.
    for (int j = 0; j < nt_; ++j) {
      const std::size_t base = g_.index(j, 0);
      for (int i = 1; i <= nn_; ++i) {
        const bool top = i == nn_;
        if (top && !has_ghost_) continue;
        const std::size_t lo = base + i - 1;
        const std::size_t hi = base + i;
        const double gn = ((top ? ghost_u_ : u_[hi]) - u_[lo]) / hn;
        const double gt = 0.5 * (ct_[lo] + (top ? 0.0 : ct_[hi]));
        const double flux =
            face_flux(gn, gt, dudrho_[lo], top ? ghost_dudrho_ : dudrho_[hi], out.max_diffusivity);
        div[lo] += flux / hn;
        if (!top) div[hi] -= flux / hn;
      }
    }

    if (g_.dim() == 2) {
      // Tangential face between j and j+1 (periodic).
      for (int j = 0; j < nt_; ++j) {
        const std::size_t a0 = g_.index(j, 0);
        const std::size_t b0 = g_.index(g_.wrap(j + 1), 0);
        for (int i = 0; i < nn_; ++i) {
          const std::size_t a = a0 + i;
          const std::size_t b = b0 + i;
          const double gt = (u_[b] - u_[a]) / ht;
          const double gn = 0.5 * (cn_[a] + cn_[b]);
          const double flux = face_flux(gt, gn, dudrho_[a], dudrho_[b], out.max_diffusivity);
          div[a] += flux / ht;
          div[b] -= flux / ht;
        }
      }
    }
    return out;
  }

 private:
  double power(double r) const {
    const double q = params_.q_exp();
    if (q == 1.0) return r;
    if (q == 2.0) return r * r;
    return r > 0.0 ? std::pow(r, q) : 0.0;
  }

  // d(rho^q)/d rho, used only for the CFL diffusivity.
  double derivative(double r) const {
    const double q = params_.q_exp();
    if (q == 1.0) return 1.0;
    if (q == 2.0) return 2.0 * r;
    return r > 0.0 ? q * std::pow(r, q - 1.0) : 0.0;
  }

  double central_n(int j, int i, double hn) const {
    const auto u = [&](int ii) { return u_[g_.index(j, ii)]; };
    if (i == 0) return (u(1) - u(0)) / hn;
    if (i == nn_ - 1) {
      if (has_ghost_) return (ghost_u_ - u(i - 1)) / (2.0 * hn);
      return (u(i) - u(i - 1)) / hn;
    }
    return (u(i + 1) - u(i - 1)) / (2.0 * hn);
  }

  // Flux along the face normal given the along-normal and transverse face gradients.
  double face_flux(double g_along, double g_across, double dudrho_a, double dudrho_b,
                   double& max_diffusivity) const {
    const double p = params_.p();
    double mult = 1.0;
    if (p != 2.0) {
      const double mag2 = g_along * g_along + g_across * g_across + delta2_;
      mult = std::pow(mag2, 0.5 * (p - 2.0));
    }
    const double c = params_.flux_factor();
    const double diffusivity = std::max(1.0, p - 1.0) * c * mult * std::max(dudrho_a, dudrho_b);
    max_diffusivity = std::max(max_diffusivity, diffusivity);
    return c * mult * g_along;
  }

  const HalfSpaceGrid& g_;
  const ModelParams& params_;
  double delta2_;
  int nn_;
  int nt_;
  std::vector<double> u_;
  std::vector<double> dudrho_;
  std::vector<double> cn_;
  std::vector<double> ct_;
  bool has_ghost_ = false;
  double ghost_u_ = 0.0;
  double ghost_dudrho_ = 0.0;
};

double cfl_limit(const HalfSpaceGrid& g, double max_diffusivity) {
  if (max_diffusivity <= 0.0) return std::numeric_limits<double>::infinity();
  const double h = g.h_min();
  return h * h / (2.0 * g.dim() * max_diffusivity);
}

void require_nonnegative(const ScalarField& rho) {
  const auto v = rho.values();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] < 0.0) {
      std::ostringstream os;
      os << "density must be nonnegative (storage index " << k << ", value " << v[k] << ")";
      throw ParameterError(os.str());
    }
  }
}

void check_support_inside(const ScalarField& rho, const DirectSolverConfig& config) {
  const auto& g = rho.grid();
  for (int j = 0; j < g.n_tangential(); ++j) {
    if (rho(j, 0) > config.positivity_threshold) {
      std::ostringstream os;
      os << "support reached the bottom of the slab (column " << j << ", tau=" << rho.time()
         << ")";
      throw DomainError(os.str());
    }
    if (config.top == TopCondition::NoFlux && rho(j, g.n_normal() - 1) > config.positivity_threshold) {
      std::ostringstream os;
      os << "support reached the top of the slab (column " << j << ", tau=" << rho.time() << ")";
      throw DomainError(os.str());
    }
  }
}

}  // namespace

double stable_dt(const ScalarField& rho, const ModelParams& params,
                 const DirectSolverConfig& config) {
  const FluxEvaluation ev = FluxAssembler(rho, params, config).evaluate();
  return config.cfl_factor * cfl_limit(rho.grid(), ev.max_diffusivity);
}

std::vector<double> flux_divergence(const ScalarField& rho, const ModelParams& params,
                                    const DirectSolverConfig& config) {
  return FluxAssembler(rho, params, config).evaluate().divergence;
}

namespace {

ScalarField advance(const ScalarField& rho, const FluxEvaluation& ev, double dt,
                    StepDiagnostics* diagnostics) {
  const auto& g = rho.grid();
  const auto v = rho.values();
  std::vector<double> next(v.size());
  StepDiagnostics diag;
  for (std::size_t k = 0; k < v.size(); ++k) {
    double x = v[k] + dt * ev.divergence[k];
    if (!std::isfinite(x)) {
      const int j = static_cast<int>(k / g.n_normal());
      const int i = static_cast<int>(k % g.n_normal());
      std::ostringstream os;
      os << "non-finite density at cell (j=" << j << ", i=" << i << "), tau=" << rho.time();
      throw NonFiniteError(os.str());
    }
    if (x < 0.0) {
      diag.clipped_mass += -x * g.cell_volume();
      ++diag.clipped_cells;
      x = 0.0;
    }
    next[k] = x;
  }
  if (diagnostics) *diagnostics = diag;
  return ScalarField(g, std::move(next), rho.time() + dt);
}

}  // namespace

ScalarField step_density(const ScalarField& rho, double dt, const ModelParams& params,
                         const DirectSolverConfig& config, StepDiagnostics* diagnostics) {
  config.validate(params);
  require_nonnegative(rho);
  if (!(dt >= 0.0)) throw CflError("time step must be nonnegative");
  const FluxEvaluation ev = FluxAssembler(rho, params, config).evaluate();
  const double limit = cfl_limit(rho.grid(), ev.max_diffusivity);
  if (dt > limit * (1.0 + 1e-9)) {
    std::ostringstream os;
    os << "CFL violated: dt=" << dt << " exceeds h^2/(2 n D_max)=" << limit;
    throw CflError(os.str());
  }
  return advance(rho, ev, dt, diagnostics);
}

SolveResult solve_density(const ScalarField& rho0, double t_end, const ModelParams& params,
                          const DirectSolverConfig& config) {
  config.validate(params);
  require_nonnegative(rho0);
  if (!(t_end > rho0.time())) throw ParameterError("t_end must exceed the initial time");

  std::vector<double> targets;
  for (double t : config.snapshot_times) {
    if (t > rho0.time() && t < t_end) targets.push_back(t);
  }
  targets.push_back(t_end);
  std::sort(targets.begin(), targets.end());
  targets.erase(std::unique(targets.begin(), targets.end()), targets.end());

  SolveResult result;
  FieldSequence lab;
  ScalarField rho = rho0;
  check_support_inside(rho, config);
  lab.push_back(rho);
  result.boundary_trace.push_back(support_boundary(rho, config.positivity_threshold));
  result.mass_trace.push_back(rho.integral());

  for (double target : targets) {
    while (rho.time() < target) {
      const FluxEvaluation ev = FluxAssembler(rho, params, config).evaluate();
      const double limit = config.cfl_factor * cfl_limit(rho.grid(), ev.max_diffusivity);
      const double remaining = target - rho.time();
      double dt = std::min(limit, remaining);
      // Avoid a sliver step just before a snapshot.
      const bool last = dt >= remaining * (1.0 - 1e-12);
      StepDiagnostics diag;
      rho = advance(rho, ev, last ? remaining : dt, &diag);
      if (last) rho = rho.with_time(target);
      result.dt_trace.push_back(last ? remaining : dt);
      result.mass_trace.push_back(rho.integral());
      result.clipped_mass += diag.clipped_mass;
      result.clipped_cells += diag.clipped_cells;
    }
    check_support_inside(rho, config);
    lab.push_back(rho);
    result.boundary_trace.push_back(support_boundary(rho, config.positivity_threshold));
  }

  result.sequence = config.frame == Frame::Lab
                        ? std::move(lab)
                        : to_wave_frame(lab, params, config.positivity_threshold);
  return result;
}

ScalarField pressure_of(const ScalarField& rho, const ModelParams& params) {
  const auto v = rho.values();
  std::vector<double> out(v.size());
  const double kappa = params.kappa();
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (v[k] < 0.0) throw ParameterError("pressure_of needs a nonnegative density");
    out[k] = v[k] == 0.0 ? 0.0 : (kappa == 1.0 ? v[k] : std::pow(v[k], kappa));
  }
  return ScalarField(rho.grid(), std::move(out), rho.time());
}

ScalarField shift_normal(const ScalarField& field, double offset, double threshold) {
  const auto& g = field.grid();
  if (std::abs(offset) >= g.z_max() - g.z_min()) {
    throw DomainError("frame shift exceeds the slab height");
  }
  const double h = g.h_normal();
  const int n = g.n_normal();
  std::vector<double> out(g.size());
  for (int j = 0; j < g.n_tangential(); ++j) {
    for (int i = 0; i < n; ++i) {
      const double z = g.normal_center(i) + offset;
      const double s = (z - g.z_min()) / h - 0.5;
      double value;
      if (s < 0.0) {
        if (field(j, 0) > threshold) {
          throw DomainError("frame shift needs data below the slab, but the bottom row is occupied");
        }
        value = 0.0;
      } else if (s > n - 1) {
        const double slope = field(j, n - 1) - field(j, n - 2);
        value = field(j, n - 1) + (s - (n - 1)) * slope;
      } else {
        int lo = std::min(static_cast<int>(std::floor(s)), n - 2);
        const double lambda = s - lo;
        value = (1.0 - lambda) * field(j, lo) + lambda * field(j, lo + 1);
      }
      out[g.index(j, i)] = value;
    }
  }
  return ScalarField(g, std::move(out), field.time());
}

FieldSequence to_wave_frame(const FieldSequence& seq, const ModelParams& params, double threshold) {
  FieldSequence out;
  for (const auto& f : seq) {
    out.push_back(f.time() == 0.0 ? f : shift_normal(f, -params.wave_speed() * f.time(), threshold));
  }
  return out;
}

FieldSequence from_wave_frame(const FieldSequence& seq, const ModelParams& params,
                              double threshold) {
  FieldSequence out;
  for (const auto& f : seq) {
    out.push_back(f.time() == 0.0 ? f : shift_normal(f, params.wave_speed() * f.time(), threshold));
  }
  return out;
}

std::vector<double> support_boundary(const ScalarField& field, double threshold) {
  const auto& g = field.grid();
  std::vector<double> out(g.n_tangential(), kNoBoundary);
  for (int j = 0; j < g.n_tangential(); ++j) {
    for (int i = 0; i < g.n_normal(); ++i) {
      const double v = field(j, i);
      if (v > threshold) {
        if (i == 0) {
          out[j] = g.normal_center(0);
        } else {
          const double below = field(j, i - 1);
          const double lambda = (threshold - below) / (v - below);
          out[j] = g.normal_center(i - 1) + std::clamp(lambda, 0.0, 1.0) * g.h_normal();
        }
        break;
      }
    }
  }
  return out;
}

std::vector<char> support_interior(const ScalarField& field, double threshold) {
  const auto& g = field.grid();
  std::vector<char> mask(g.size(), 0);
  for (int j = 0; j < g.n_tangential(); ++j) {
    for (int i = 1; i + 1 < g.n_normal(); ++i) {
      bool ok = field(j, i) > threshold && field(j, i - 1) > threshold &&
                field(j, i + 1) > threshold;
      if (ok && g.dim() == 2) {
        ok = field(g.wrap(j - 1), i) > threshold && field(g.wrap(j + 1), i) > threshold;
      }
      mask[g.index(j, i)] = ok ? 1 : 0;
    }
  }
  return mask;
}

FieldSequence residual_density(const FieldSequence& seq, const ModelParams& params,
                               const DirectSolverConfig& config) {
  if (seq.size() < 2) throw SnapshotDensityError("residual_density needs at least two snapshots");
  FieldSequence out;
  const auto& g = seq.grid();
  std::vector<double> prev_div = flux_divergence(seq[0], params, config);
  for (std::size_t k = 0; k + 1 < seq.size(); ++k) {
    const ScalarField& a = seq[k];
    const ScalarField& b = seq[k + 1];
    const std::vector<double> next_div = flux_divergence(b, params, config);
    const auto mask_a = support_interior(a, config.positivity_threshold);
    const auto mask_b = support_interior(b, config.positivity_threshold);
    const double dt = b.time() - a.time();
    std::vector<double> r(g.size(), 0.0);
    for (std::size_t c = 0; c < r.size(); ++c) {
      if (!mask_a[c] || !mask_b[c]) continue;
      r[c] = (b.values()[c] - a.values()[c]) / dt - 0.5 * (prev_div[c] + next_div[c]);
    }
    out.push_back(ScalarField(g, std::move(r), 0.5 * (a.time() + b.time())));
    prev_div = next_div;
  }
  return out;
}

}  // namespace dnwave
