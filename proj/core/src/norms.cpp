#include "dnwave/norms.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <sstream>

#include "dnwave/error.hpp"

namespace dnwave {

namespace {

struct Window {
  double r = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<std::pair<std::size_t, double>> weights;  // snapshot index, quadrature weight
};

std::vector<Window> build_windows(const std::vector<double>& times, double T,
                                  const NormLattice& lattice) {
  if (!(T > 0.0)) throw ParameterError("norm horizon T must be positive");
  if (lattice.levels_per_octave < 1) throw ParameterError("levels_per_octave must be >= 1");
  double r2_min = lattice.r2_min;
  if (r2_min <= 0.0) {
    auto it = std::find_if(times.begin(), times.end(), [](double t) { return t > 0.0; });
    if (it == times.end()) throw SnapshotDensityError("no positive snapshot time");
    r2_min = 2.0 * *it;
  }
  std::vector<Window> out;
  for (int k = 0;; ++k) {
    const double r2 = T * std::exp2(-static_cast<double>(k) / lattice.levels_per_octave);
    if (r2 < r2_min * (1.0 - 1e-12)) break;
    Window w;
    w.r = std::sqrt(r2);
    w.lo = 0.5 * r2;
    w.hi = r2;
    const double tol = 1e-12 * r2;
    std::vector<std::size_t> inside;
    for (std::size_t i = 0; i < times.size(); ++i) {
      if (times[i] >= w.lo - tol && times[i] <= w.hi + tol) inside.push_back(i);
    }
    if (inside.size() < 2) {
      std::ostringstream os;
      os << "window (" << w.lo << ", " << w.hi << ") holds " << inside.size()
         << " snapshot(s); at least 2 are required";
      throw SnapshotDensityError(os.str());
    }
    for (std::size_t a = 0; a < inside.size(); ++a) {
      const double left = a == 0 ? w.lo : 0.5 * (times[inside[a - 1]] + times[inside[a]]);
      const double right =
          a + 1 == inside.size() ? w.hi : 0.5 * (times[inside[a]] + times[inside[a + 1]]);
      w.weights.emplace_back(inside[a], std::max(0.0, right - left));
    }
    out.push_back(std::move(w));
  }
  if (out.empty()) throw SnapshotDensityError("dyadic lattice is empty; T is below r2_min");
  return out;
}

std::vector<Point> lattice_centres(const HalfSpaceGrid& g, int stride) {
  if (stride < 1) throw ParameterError("lattice stride must be >= 1");
  std::vector<Point> out;
  for (int j = 0; j < g.n_tangential(); ++j) {
    const bool column = j % stride == 0;
    for (int i = 0; i < g.n_normal(); ++i) {
      if (i == 0 || (column && i % stride == 0)) {
        out.push_back({g.tangential_center(j), g.normal_center(i)});
      }
    }
  }
  return out;
}

/// Row-pruned ball enumeration: d~ >= |dn| / (sqrt(z_n) + sqrt(zhat_n) + sqrt|dn|).
void ball_cells(const HalfSpaceGrid& g, const Point& c, double r, std::vector<std::size_t>& cells) {
  cells.clear();
  const double period = g.dim() == 2 ? g.tangential_extent() : 0.0;
  for (int i = 0; i < g.n_normal(); ++i) {
    const double zn = g.normal_center(i);
    const double dn = std::abs(zn - c.n);
    if (dn > 0.0 && dn / (std::sqrt(zn) + std::sqrt(c.n) + std::sqrt(dn)) >= r) continue;
    for (int j = 0; j < g.n_tangential(); ++j) {
      if (cc_distance_periodic({g.tangential_center(j), zn}, c, period) < r) {
        cells.push_back(g.index(j, i));
      }
    }
  }
}

/// A Carleson integrand: pointwise data per snapshot and the (r, zhat) weight.
struct Integrand {
  std::string key;
  std::vector<std::vector<double>> data;  // per snapshot; may be empty for unused ones
  std::function<double(double r, double zhat_n)> weight;
};

void carleson(const HalfSpaceGrid& grid, const std::vector<Window>& windows,
              const NormLattice& lattice, double q, std::vector<Integrand>& integrands,
              std::map<std::string, NormComponent>& out) {
  const auto centres = lattice_centres(grid, lattice.stride);
  const std::size_t n = grid.size();
  for (const auto& in : integrands) out[in.key] = NormComponent{};

  std::vector<std::size_t> cells;
  std::vector<std::vector<double>> acc(integrands.size(), std::vector<double>(n));
  std::vector<double> scale(integrands.size());
  for (const auto& win : windows) {
    // Time-integrated (|f| / M)^q with M the window maximum; keeps large q in range.
    for (std::size_t a = 0; a < integrands.size(); ++a) {
      double m = 0.0;
      for (const auto& [k, wt] : win.weights) {
        for (double v : integrands[a].data[k]) m = std::max(m, std::abs(v));
      }
      scale[a] = m;
      std::fill(acc[a].begin(), acc[a].end(), 0.0);
      if (m == 0.0) continue;
      for (const auto& [k, wt] : win.weights) {
        const auto& d = integrands[a].data[k];
        for (std::size_t c = 0; c < n; ++c) acc[a][c] += wt * std::pow(std::abs(d[c]) / m, q);
      }
    }
    const double time_len = win.hi - win.lo;
    for (const auto& c : centres) {
      ball_cells(grid, c, win.r, cells);
      if (cells.empty()) continue;
      for (std::size_t a = 0; a < integrands.size(); ++a) {
        if (scale[a] == 0.0) continue;
        double s = 0.0;
        for (std::size_t cell : cells) s += acc[a][cell];
        const double mean = scale[a] * std::pow(s / (time_len * static_cast<double>(cells.size())),
                                                1.0 / q);
        const double value = integrands[a].weight(win.r, c.n) * mean;
        auto& comp = out[integrands[a].key];
        if (value > comp.value) comp = NormComponent{value, win.r, c};
      }
    }
  }
}

std::vector<double> copy_values(const ScalarField& f) {
  return {f.values().begin(), f.values().end()};
}

void require_q(double q) {
  if (!(q >= 1.0) || !std::isfinite(q)) throw ParameterError("norm exponent q must be >= 1 and finite");
}

}  // namespace

nlohmann::json NormLattice::to_json() const {
  return {{"radii", "r^2 = T 2^(-k/levels_per_octave)"},
          {"levels_per_octave", levels_per_octave},
          {"r2_min", r2_min},
          {"centres", "every stride-th cell plus the bottom row"},
          {"stride", stride}};
}

double NormReport::x_total() const {
  double s = 0.0;
  for (const auto& [k, c] : x_components) s += c.value;
  return s;
}

double NormReport::y_total() const {
  double s = 0.0;
  for (const auto& [k, c] : y_components) s += c.value;
  return s;
}

double NormReport::carleson_total() const {
  double s = 0.0;
  for (const auto& [k, c] : x_components) {
    if (k.rfind("E(", 0) == 0) s += c.value;
  }
  return s;
}

nlohmann::json NormReport::to_json() const {
  auto comps = [](const std::map<std::string, NormComponent>& m) {
    nlohmann::json j = nlohmann::json::object();
    for (const auto& [k, c] : m) {
      j[k] = {{"value", c.value}, {"r", c.r}, {"z_hat", {c.z_hat.t, c.z_hat.n}}};
    }
    return j;
  };
  nlohmann::json j = {{"q", q}, {"T", T}, {"lipschitz", lipschitz}, {"lattice", lattice.to_json()}};
  if (!x_components.empty()) {
    j["x_components"] = comps(x_components);
    j["x_total"] = x_total();
  }
  if (!y_components.empty()) {
    j["y_components"] = comps(y_components);
    j["y_total"] = y_total();
  }
  return j;
}

ScalarField time_derivative(const FieldSequence& seq, std::size_t k) {
  if (seq.size() < 2) throw SnapshotDensityError("time derivative needs two snapshots");
  const auto& g = seq.grid();
  std::vector<double> out(g.size());
  const auto at = [&](std::size_t i) { return seq[i].values(); };
  if (k == 0 || k + 1 == seq.size()) {
    const std::size_t a = k == 0 ? 0 : k - 1;
    const std::size_t b = a + 1;
    const double dt = seq[b].time() - seq[a].time();
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = (at(b)[c] - at(a)[c]) / dt;
  } else {
    const double h1 = seq[k].time() - seq[k - 1].time();
    const double h2 = seq[k + 1].time() - seq[k].time();
    const double cm = -h2 / (h1 * (h1 + h2));
    const double c0 = (h2 - h1) / (h1 * h2);
    const double cp = h1 / (h2 * (h1 + h2));
    for (std::size_t c = 0; c < out.size(); ++c) {
      out[c] = cm * at(k - 1)[c] + c0 * at(k)[c] + cp * at(k + 1)[c];
    }
  }
  return ScalarField(g, std::move(out), seq[k].time());
}

NormReport y_norm(const FieldSequence& f, double q, double T, const NormLattice& lattice) {
  require_q(q);
  if (f.empty()) throw SnapshotDensityError("empty sequence");
  const auto windows = build_windows(f.times(), T, lattice);
  std::vector<Integrand> ins(2);
  ins[0].key = "beta0";
  ins[0].weight = [](double r, double zn) { return r / (r + std::sqrt(zn)); };
  ins[1].key = "beta1";
  ins[1].weight = [](double r, double) { return r * r; };
  for (const auto& s : f) {
    ins[0].data.push_back(copy_values(s));
    ins[1].data.push_back(copy_values(magnitude(gradient(s))));
  }
  NormReport rep;
  rep.q = q;
  rep.T = T;
  rep.lattice = lattice;
  carleson(f.grid(), windows, lattice, q, ins, rep.y_components);
  rep.lipschitz = 0.0;
  for (const auto& d : ins[1].data) {
    for (double v : d) rep.lipschitz = std::max(rep.lipschitz, v);
  }
  return rep;
}

NormReport x_norm(const FieldSequence& w, double q, double T, const NormLattice& lattice) {
  require_q(q);
  if (w.empty()) throw SnapshotDensityError("empty sequence");
  const auto& grid = w.grid();
  if (w.size() < 2) throw SnapshotDensityError("x_norm needs at least two snapshots");
  const auto windows = build_windows(w.times(), T, lattice);

  FieldSequence grad_t;
  FieldSequence grad_n;
  std::vector<Integrand> ins(3);
  ins[0].key = "E(0,0,1)";
  ins[0].weight = [](double r, double zn) { return r * (r + std::sqrt(zn)); };
  ins[1].key = "E(0,1,0)";
  ins[1].weight = [](double r, double) { return r * r; };
  ins[2].key = "E(1,0,2)";
  ins[2].weight = [](double r, double) { return r * r; };

  NormReport rep;
  rep.q = q;
  rep.T = T;
  rep.lattice = lattice;
  NormComponent grad_sup;
  NormComponent hess_sup;
  const double t_cut = T * (1.0 + 1e-12);
  for (const auto& s : w) {
    const auto gr = gradient(s);
    const auto gm = magnitude(gr);
    const auto hm = magnitude(hessian(s));
    grad_t.push_back(gr.t);
    grad_n.push_back(gr.n);
    ins[0].data.push_back(copy_values(hm));
    auto third = copy_values(third_derivative_magnitude(s));
    for (int j = 0; j < grid.n_tangential(); ++j) {
      for (int i = 0; i < grid.n_normal(); ++i) {
        const std::size_t c = grid.index(j, i);
        third[c] *= grid.normal_center(i);
        if (s.time() > t_cut) continue;
        const Point z{grid.tangential_center(j), grid.normal_center(i)};
        if (gm.values()[c] > grad_sup.value) grad_sup = {gm.values()[c], 0.0, z};
        const double h = std::sqrt(s.time() * z.n) * hm.values()[c];
        if (h > hess_sup.value) hess_sup = {h, 0.0, z};
      }
    }
    ins[2].data.push_back(std::move(third));
  }
  for (std::size_t k = 0; k < w.size(); ++k) {
    const auto dt = time_derivative(grad_t, k);
    const auto dn = time_derivative(grad_n, k);
    std::vector<double> v(grid.size());
    for (std::size_t c = 0; c < v.size(); ++c) v[c] = std::hypot(dt.values()[c], dn.values()[c]);
    ins[1].data.push_back(std::move(v));
  }
  carleson(grid, windows, lattice, q, ins, rep.x_components);
  rep.x_components["grad_sup"] = grad_sup;
  rep.x_components["sqrt_t_zn_hess_sup"] = hess_sup;
  rep.lipschitz = grad_sup.value;
  return rep;
}

}  // namespace dnwave
