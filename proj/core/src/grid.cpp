#include "dnwave/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dnwave/error.hpp"

namespace dnwave {

HalfSpaceGrid::HalfSpaceGrid(int dim, double z_min, double z_max, int n_normal, double extent,
                             int n_tangential)
    : dim_(dim),
      z_min_(z_min),
      z_max_(z_max),
      n_normal_(n_normal),
      tangential_extent_(extent),
      n_tangential_(n_tangential) {
  if (dim != 1 && dim != 2) throw GridError("grid dimension must be 1 or 2");
  if (!(z_max > z_min)) throw GridError("grid needs z_max > z_min");
  if (n_normal < 1 || n_tangential < 1) throw GridError("grid needs at least one cell per axis");
  if (dim == 2 && !(extent > 0.0)) throw GridError("tangential extent must be positive");
}

HalfSpaceGrid HalfSpaceGrid::one_d(double z_max, int n_normal, double z_min) {
  return HalfSpaceGrid(1, z_min, z_max, n_normal, 0.0, 1);
}

HalfSpaceGrid HalfSpaceGrid::two_d(double z_max, int n_normal, double tangential_extent,
                                   int n_tangential, double z_min) {
  return HalfSpaceGrid(2, z_min, z_max, n_normal, tangential_extent, n_tangential);
}

double HalfSpaceGrid::h_min() const {
  return dim_ == 2 ? std::min(h_normal(), h_tangential()) : h_normal();
}

HalfSpaceGrid HalfSpaceGrid::refined() const {
  return HalfSpaceGrid(dim_, z_min_, z_max_, 2 * n_normal_, tangential_extent_,
                       dim_ == 2 ? 2 * n_tangential_ : 1);
}

HalfSpaceGrid HalfSpaceGrid::coarsened() const {
  if (n_normal_ % 2 != 0 || (dim_ == 2 && n_tangential_ % 2 != 0)) {
    throw GridError("coarsening needs even cell counts");
  }
  return HalfSpaceGrid(dim_, z_min_, z_max_, n_normal_ / 2, tangential_extent_,
                       dim_ == 2 ? n_tangential_ / 2 : 1);
}

HalfSpaceGrid HalfSpaceGrid::with_tangential_scale(double factor) const {
  if (dim_ == 1) return *this;
  return HalfSpaceGrid(dim_, z_min_, z_max_, n_normal_, tangential_extent_ * factor,
                       n_tangential_);
}

ScalarField::ScalarField(HalfSpaceGrid grid, std::vector<double> values, double time)
    : grid_(grid), values_(std::move(values)), time_(time) {
  if (values_.size() != grid_.size()) {
    throw GridError("field size does not match grid cell count");
  }
  if (!(time >= 0.0) || !std::isfinite(time)) throw GridError("field time must be finite and >= 0");
  for (std::size_t k = 0; k < values_.size(); ++k) {
    if (!std::isfinite(values_[k])) {
      std::ostringstream os;
      os << "non-finite field value at storage index " << k;
      throw NonFiniteError(os.str());
    }
  }
}

ScalarField ScalarField::from_function(const HalfSpaceGrid& grid,
                                       const std::function<double(double, double)>& f,
                                       double time) {
  std::vector<double> v(grid.size());
  for (int j = 0; j < grid.n_tangential(); ++j) {
    const double zt = grid.tangential_center(j);
    for (int i = 0; i < grid.n_normal(); ++i) {
      v[grid.index(j, i)] = f(zt, grid.normal_center(i));
    }
  }
  return ScalarField(grid, std::move(v), time);
}

ScalarField ScalarField::zeros(const HalfSpaceGrid& grid, double time) {
  return ScalarField(grid, std::vector<double>(grid.size(), 0.0), time);
}

ScalarField ScalarField::with_time(double time) const { return ScalarField(grid_, values_, time); }

double ScalarField::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double ScalarField::integral() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * grid_.cell_volume();
}

double ScalarField::mean() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s / static_cast<double>(values_.size());
}

FieldSequence::FieldSequence(std::vector<ScalarField> fields) {
  for (auto& f : fields) push_back(std::move(f));
}

void FieldSequence::push_back(ScalarField field) {
  if (!fields_.empty()) {
    if (!(field.grid() == fields_.front().grid())) {
      throw GridError("all fields of a sequence must share one grid");
    }
    if (!(field.time() > fields_.back().time())) {
      throw GridError("sequence times must be strictly increasing");
    }
  }
  fields_.push_back(std::move(field));
}

std::vector<double> FieldSequence::times() const {
  std::vector<double> t;
  t.reserve(fields_.size());
  for (const auto& f : fields_) t.push_back(f.time());
  return t;
}

namespace {

// Stencil helpers on raw storage. `v` is normal-fastest with n cells per column.

double normal_first(std::span<const double> v, const HalfSpaceGrid& g, int j, int i,
                    TopBoundary top) {
  const int n = g.n_normal();
  const double h = g.h_normal();
  const std::size_t c = g.index(j, 0);
  if (i == 0) return (-3.0 * v[c] + 4.0 * v[c + 1] - v[c + 2]) / (2.0 * h);
  if (i == n - 1) {
    if (top == TopBoundary::Mirror) return (v[c + i] - v[c + i - 1]) / (2.0 * h);
    return (3.0 * v[c + i] - 4.0 * v[c + i - 1] + v[c + i - 2]) / (2.0 * h);
  }
  return (v[c + i + 1] - v[c + i - 1]) / (2.0 * h);
}

double normal_second(std::span<const double> v, const HalfSpaceGrid& g, int j, int i,
                     TopBoundary top) {
  const int n = g.n_normal();
  const double h2 = g.h_normal() * g.h_normal();
  const std::size_t c = g.index(j, 0);
  if (i == 0) return (2.0 * v[c] - 5.0 * v[c + 1] + 4.0 * v[c + 2] - v[c + 3]) / h2;
  if (i == n - 1) {
    if (top == TopBoundary::Mirror) return (v[c + i - 1] - v[c + i]) / h2;
    return (2.0 * v[c + i] - 5.0 * v[c + i - 1] + 4.0 * v[c + i - 2] - v[c + i - 3]) / h2;
  }
  return (v[c + i + 1] - 2.0 * v[c + i] + v[c + i - 1]) / h2;
}

double tangential_first(std::span<const double> v, const HalfSpaceGrid& g, int j, int i) {
  if (g.dim() == 1) return 0.0;
  return (v[g.index(g.wrap(j + 1), i)] - v[g.index(g.wrap(j - 1), i)]) / (2.0 * g.h_tangential());
}

double tangential_second(std::span<const double> v, const HalfSpaceGrid& g, int j, int i) {
  if (g.dim() == 1) return 0.0;
  const double h = g.h_tangential();
  return (v[g.index(g.wrap(j + 1), i)] - 2.0 * v[g.index(j, i)] + v[g.index(g.wrap(j - 1), i)]) /
         (h * h);
}

double mixed(std::span<const double> v, const HalfSpaceGrid& g, int j, int i, TopBoundary top) {
  if (g.dim() == 1) return 0.0;
  return (normal_first(v, g, g.wrap(j + 1), i, top) - normal_first(v, g, g.wrap(j - 1), i, top)) /
         (2.0 * g.h_tangential());
}

void require_cells(const HalfSpaceGrid& g, int normal_needed) {
  if (g.n_normal() < normal_needed) {
    std::ostringstream os;
    os << "grid too small: stencil needs " << normal_needed << " normal cells, grid has "
       << g.n_normal();
    throw GridError(os.str());
  }
  if (g.dim() == 2 && g.n_tangential() < 3) {
    throw GridError("grid too small: tangential stencils need at least 3 cells");
  }
}

template <typename F>
ScalarField map_cells(const ScalarField& field, F&& f) {
  const auto& g = field.grid();
  std::vector<double> out(g.size());
  for (int j = 0; j < g.n_tangential(); ++j) {
    for (int i = 0; i < g.n_normal(); ++i) out[g.index(j, i)] = f(j, i);
  }
  return ScalarField(g, std::move(out), field.time());
}

}  // namespace

GradientField gradient(const ScalarField& field, TopBoundary top) {
  const auto& g = field.grid();
  require_cells(g, 3);
  const auto v = field.values();
  return {map_cells(field, [&](int j, int i) { return tangential_first(v, g, j, i); }),
          map_cells(field, [&](int j, int i) { return normal_first(v, g, j, i, top); })};
}

HessianField hessian(const ScalarField& field, TopBoundary top) {
  const auto& g = field.grid();
  require_cells(g, 4);
  const auto v = field.values();
  return {map_cells(field, [&](int j, int i) { return tangential_second(v, g, j, i); }),
          map_cells(field, [&](int j, int i) { return mixed(v, g, j, i, top); }),
          map_cells(field, [&](int j, int i) { return normal_second(v, g, j, i, top); })};
}

Jet jet_at(const ScalarField& field, int j, int i, TopBoundary top) {
  const auto& g = field.grid();
  require_cells(g, 4);
  const auto v = field.values();
  Jet jet;
  jet.z_n = g.normal_center(i);
  jet.value = v[g.index(j, i)];
  jet.w_t = tangential_first(v, g, j, i);
  jet.w_n = normal_first(v, g, j, i, top);
  jet.w_tt = tangential_second(v, g, j, i);
  jet.w_tn = mixed(v, g, j, i, top);
  jet.w_nn = normal_second(v, g, j, i, top);
  return jet;
}

std::vector<Jet> jets(const ScalarField& field, TopBoundary top) {
  const auto& g = field.grid();
  require_cells(g, 4);
  const auto v = field.values();
  const int n = g.n_normal();
  const double h = g.h_tangential();

  // Normal derivatives first so that the mixed derivative reuses them.
  std::vector<double> dn(g.size());
  for (int j = 0; j < g.n_tangential(); ++j) {
    for (int i = 0; i < n; ++i) dn[g.index(j, i)] = normal_first(v, g, j, i, top);
  }
  std::vector<Jet> out(g.size());
  for (int j = 0; j < g.n_tangential(); ++j) {
    for (int i = 0; i < n; ++i) {
      Jet& jet = out[g.index(j, i)];
      jet.z_n = g.normal_center(i);
      jet.value = v[g.index(j, i)];
      jet.w_n = dn[g.index(j, i)];
      jet.w_nn = normal_second(v, g, j, i, top);
      if (g.dim() == 2) {
        jet.w_t = tangential_first(v, g, j, i);
        jet.w_tt = tangential_second(v, g, j, i);
        jet.w_tn = (dn[g.index(g.wrap(j + 1), i)] - dn[g.index(g.wrap(j - 1), i)]) / (2.0 * h);
      }
    }
  }
  return out;
}

ScalarField magnitude(const GradientField& gf) {
  const auto t = gf.t.values();
  const auto n = gf.n.values();
  std::vector<double> out(t.size());
  for (std::size_t k = 0; k < t.size(); ++k) out[k] = std::hypot(t[k], n[k]);
  return ScalarField(gf.n.grid(), std::move(out), gf.n.time());
}

ScalarField magnitude(const HessianField& hf) {
  const auto tt = hf.tt.values();
  const auto tn = hf.tn.values();
  const auto nn = hf.nn.values();
  std::vector<double> out(tt.size());
  for (std::size_t k = 0; k < tt.size(); ++k) {
    out[k] = std::sqrt(tt[k] * tt[k] + 2.0 * tn[k] * tn[k] + nn[k] * nn[k]);
  }
  return ScalarField(hf.nn.grid(), std::move(out), hf.nn.time());
}

ScalarField third_derivative_magnitude(const ScalarField& field, TopBoundary top) {
  const HessianField h = hessian(field, top);
  const GradientField d_tt = gradient(h.tt, top);
  const GradientField d_tn = gradient(h.tn, top);
  const GradientField d_nn = gradient(h.nn, top);
  const std::size_t size = field.grid().size();
  std::vector<double> out(size);
  for (std::size_t k = 0; k < size; ++k) {
    // Symmetrised third derivatives; ttn and tnn each occur three times.
    const double ttt = d_tt.t.values()[k];
    const double ttn = (d_tt.n.values()[k] + d_tn.t.values()[k]) / 2.0;
    const double tnn = (d_tn.n.values()[k] + d_nn.t.values()[k]) / 2.0;
    const double nnn = d_nn.n.values()[k];
    out[k] = std::sqrt(ttt * ttt + 3.0 * ttn * ttn + 3.0 * tnn * tnn + nnn * nnn);
  }
  return ScalarField(field.grid(), std::move(out), field.time());
}

namespace {

// Linear interpolation of a line of cell values onto the two children of each cell.
void refine_line(const double* in, int n, std::ptrdiff_t in_stride, double* out,
                 std::ptrdiff_t out_stride, bool periodic) {
  for (int i = 0; i < n; ++i) {
    const double c = in[i * in_stride];
    double below;
    double above;
    if (periodic) {
      below = in[((i - 1 + n) % n) * in_stride];
      above = in[((i + 1) % n) * in_stride];
    } else {
      below = i > 0 ? in[(i - 1) * in_stride] : 2.0 * c - in[1 * in_stride];
      above = i < n - 1 ? in[(i + 1) * in_stride] : 2.0 * c - in[(n - 2) * in_stride];
    }
    out[(2 * i) * out_stride] = 0.75 * c + 0.25 * below;
    out[(2 * i + 1) * out_stride] = 0.75 * c + 0.25 * above;
  }
}

}  // namespace

ScalarField refine(const ScalarField& field) {
  const auto& g = field.grid();
  if (g.n_normal() < 2) throw GridError("refine needs at least two normal cells");
  const HalfSpaceGrid fine = g.refined();
  const int nn = g.n_normal();
  const int nt = g.n_tangential();
  const auto v = field.values();

  // Normal direction first, then tangential (periodic).
  std::vector<double> stage(static_cast<std::size_t>(nt) * 2 * nn);
  for (int j = 0; j < nt; ++j) {
    refine_line(v.data() + g.index(j, 0), nn, 1, stage.data() + static_cast<std::size_t>(j) * 2 * nn,
                1, false);
  }
  if (g.dim() == 1) return ScalarField(fine, std::move(stage), field.time());

  std::vector<double> out(fine.size());
  for (int i = 0; i < 2 * nn; ++i) {
    refine_line(stage.data() + i, nt, 2 * nn, out.data() + i, 2 * nn, true);
  }
  return ScalarField(fine, std::move(out), field.time());
}

ScalarField restrict_field(const ScalarField& field) {
  const auto& g = field.grid();
  const HalfSpaceGrid coarse = g.coarsened();
  const auto v = field.values();
  std::vector<double> out(coarse.size(), 0.0);
  for (int j = 0; j < coarse.n_tangential(); ++j) {
    for (int i = 0; i < coarse.n_normal(); ++i) {
      double s = v[g.index(g.dim() == 2 ? 2 * j : 0, 2 * i)] +
                 v[g.index(g.dim() == 2 ? 2 * j : 0, 2 * i + 1)];
      if (g.dim() == 2) {
        s += v[g.index(2 * j + 1, 2 * i)] + v[g.index(2 * j + 1, 2 * i + 1)];
        s /= 4.0;
      } else {
        s /= 2.0;
      }
      out[coarse.index(j, i)] = s;
    }
  }
  return ScalarField(coarse, std::move(out), field.time());
}

bool interpolate_normal(const ScalarField& field, int j, double z, double& out) {
  const auto& g = field.grid();
  const double h = g.h_normal();
  const double s = (z - g.z_min()) / h - 0.5;
  if (s < 0.0 || s > g.n_normal() - 1) return false;
  int i = static_cast<int>(std::floor(s));
  if (i >= g.n_normal() - 1) i = g.n_normal() - 2;
  const double lambda = s - i;
  out = (1.0 - lambda) * field(j, i) + lambda * field(j, i + 1);
  return true;
}

double convergence_order(double e_coarse, double e_fine) { return std::log2(e_coarse / e_fine); }

}  // namespace dnwave
