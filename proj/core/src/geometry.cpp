#include "dnwave/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "dnwave/error.hpp"

namespace dnwave {

namespace {

double cc_from_delta(double dt, double dn, double an, double bn) {
  const double e = std::hypot(dt, dn);
  if (e == 0.0) return 0.0;
  return e / (std::sqrt(std::max(an, 0.0)) + std::sqrt(std::max(bn, 0.0)) + std::sqrt(e));
}

}  // namespace

double cc_distance(const Point& a, const Point& b) {
  return cc_from_delta(a.t - b.t, a.n - b.n, a.n, b.n);
}

double cc_distance_periodic(const Point& a, const Point& b, double period) {
  double dt = a.t - b.t;
  if (period > 0.0) dt -= period * std::round(dt / period);
  return cc_from_delta(dt, a.n - b.n, a.n, b.n);
}

Ball cc_ball_or_empty(const HalfSpaceGrid& grid, const Point& centre_hat, double r) {
  if (!(r > 0.0)) throw ParameterError("ball radius must be positive");
  Ball ball;
  const double period = grid.dim() == 2 ? grid.tangential_extent() : 0.0;
  for (int j = 0; j < grid.n_tangential(); ++j) {
    const double zt = grid.tangential_center(j);
    for (int i = 0; i < grid.n_normal(); ++i) {
      const Point z{zt, grid.normal_center(i)};
      if (cc_distance_periodic(z, centre_hat, period) < r) ball.cells.push_back(grid.index(j, i));
    }
  }
  ball.volume = static_cast<double>(ball.cells.size()) * grid.cell_volume();
  return ball;
}

Ball cc_ball(const HalfSpaceGrid& grid, const Point& centre_hat, double r) {
  Ball ball = cc_ball_or_empty(grid, centre_hat, r);
  if (ball.cells.empty()) throw GridError("CC ball contains no cell centre (radius below resolution)");
  return ball;
}

double lipschitz_seminorm(const ScalarField& w) { return magnitude(gradient(w)).max_abs(); }

double lipschitz_seminorm(const FieldSequence& seq) {
  double out = 0.0;
  for (const auto& f : seq) out = std::max(out, lipschitz_seminorm(f));
  return out;
}

RatioRange quasi_isometry_ratio(const ScalarField& zeta,
                                const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  const auto& g = zeta.grid();
  const auto v = zeta.values();
  RatioRange out{std::numeric_limits<double>::infinity(), 0.0};
  for (const auto& [a, b] : pairs) {
    if (a == b) continue;
    const int ja = static_cast<int>(a) / g.n_normal();
    const int ia = static_cast<int>(a) % g.n_normal();
    const int jb = static_cast<int>(b) / g.n_normal();
    const int ib = static_cast<int>(b) % g.n_normal();
    const double dt = g.tangential_center(ja) - g.tangential_center(jb);
    const double dx = std::hypot(dt, g.normal_center(ia) - g.normal_center(ib));
    const double dy = std::hypot(dt, v[a] - v[b]);
    const double ratio = dy / dx;
    out.min_ratio = std::min(out.min_ratio, ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  if (out.max_ratio == 0.0) out.min_ratio = 0.0;
  return out;
}

RatioRange quasi_isometry_ratio(const ScalarField& zeta, std::size_t count, std::uint64_t seed,
                                int first_row) {
  const auto& g = zeta.grid();
  const int rows = g.n_normal() - std::max(first_row, 0);
  const std::size_t n = static_cast<std::size_t>(std::max(rows, 0)) * g.n_tangential();
  if (n < 2) throw GridError("quasi-isometry check needs at least two cells");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const auto cell = [&](std::size_t k) {
    return g.index(static_cast<int>(k / rows), g.n_normal() - rows + static_cast<int>(k % rows));
  };
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  pairs.reserve(count);
  while (pairs.size() < count) {
    const std::size_t a = pick(rng);
    const std::size_t b = pick(rng);
    if (a != b) pairs.emplace_back(cell(a), cell(b));
  }
  return quasi_isometry_ratio(zeta, pairs);
}

}  // namespace dnwave
