#include "dnwave/hodograph.hpp"

#include <cmath>
#include <sstream>

#include "dnwave/error.hpp"

namespace dnwave {

namespace {

void require_same_columns(const HalfSpaceGrid& a, const HalfSpaceGrid& b) {
  if (a.dim() != b.dim() || a.n_tangential() != b.n_tangential() ||
      (a.dim() == 2 && std::abs(a.tangential_extent() - b.tangential_extent()) >
                           1e-12 * a.tangential_extent())) {
    throw GridError("hodograph grids must share their tangential columns");
  }
}

}  // namespace

ScalarField hodograph(const ScalarField& g, const HalfSpaceGrid& x_grid, double threshold,
                      double min_slope) {
  const auto& yg = g.grid();
  require_same_columns(yg, x_grid);
  const int ny = yg.n_normal();
  const double hy = yg.h_normal();
  std::vector<double> out(x_grid.size());

  for (int j = 0; j < yg.n_tangential(); ++j) {
    int first = 0;
    while (first < ny && g(j, first) <= threshold) ++first;
    if (first == ny) throw DomainError("hodograph: column without support");
    if (first == 0) throw DomainError("hodograph: support reaches the bottom of the y-slab");
    const int start = first - 1;
    const double lowest_level = x_grid.normal_center(0);
    for (int i = start; i + 1 < ny; ++i) {
      const double slope = (g(j, i + 1) - g(j, i)) / hy;
      // The slope bound applies where levels are inverted; below the lowest
      // level (the smeared front) strict increase is enough.
      const bool used = i > start && g(j, i + 1) >= lowest_level;
      if (!(slope > 0.0) || (used && slope < min_slope)) {
        std::ostringstream os;
        os << "hodograph: pressure not increasing in the normal direction at column " << j
           << ", y_n = " << yg.normal_center(i) << " (slope " << slope << ")";
        throw MonotonicityError(os.str());
      }
    }
    int seg = start;
    for (int i = 0; i < x_grid.n_normal(); ++i) {
      const double level = x_grid.normal_center(i);
      while (seg + 2 < ny && g(j, seg + 1) <= level) ++seg;
      const double g0 = g(j, seg);
      const double g1 = g(j, seg + 1);
      if (level > g1 + (g1 - g0)) {
        std::ostringstream os;
        os << "hodograph: level x_n = " << level << " above the pressure data at column " << j;
        throw DomainError(os.str());
      }
      out[x_grid.index(j, i)] = yg.normal_center(seg) + (level - g0) / (g1 - g0) * hy;
    }
  }
  return ScalarField(x_grid, std::move(out), g.time());
}

ScalarField hodograph_inverse(const ScalarField& zeta, const HalfSpaceGrid& y_grid) {
  const auto& xg = zeta.grid();
  require_same_columns(xg, y_grid);
  const int nx = xg.n_normal();
  if (nx < 2) throw GridError("hodograph inverse needs two normal cells");
  if (xg.z_min() != 0.0) throw GridError("hodograph inverse expects an x-grid on the half-space");
  std::vector<double> out(y_grid.size());

  for (int j = 0; j < xg.n_tangential(); ++j) {
    // Node list (x_n, zeta) starting at the free boundary x_n = 0.
    std::vector<double> xs{0.0};
    std::vector<double> ys{zeta(j, 0) - 0.5 * (zeta(j, 1) - zeta(j, 0))};
    for (int i = 0; i < nx; ++i) {
      xs.push_back(xg.normal_center(i));
      ys.push_back(zeta(j, i));
      if (!(ys.back() > ys[ys.size() - 2])) {
        std::ostringstream os;
        os << "hodograph inverse: zeta not increasing at column " << j << ", x_n = " << xs.back();
        throw MonotonicityError(os.str());
      }
    }
    std::size_t seg = 0;
    for (int i = 0; i < y_grid.n_normal(); ++i) {
      const double y = y_grid.normal_center(i);
      double value = 0.0;
      if (y > ys.front()) {
        while (seg + 2 < ys.size() && ys[seg + 1] <= y) ++seg;
        value = xs[seg] + (y - ys[seg]) / (ys[seg + 1] - ys[seg]) * (xs[seg + 1] - xs[seg]);
      }
      out[y_grid.index(j, i)] = value;
    }
  }
  return ScalarField(y_grid, std::move(out), zeta.time());
}

}  // namespace dnwave
