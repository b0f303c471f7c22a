#pragma once

// Carnot-Caratheodory geometry of the half-space, Lipschitz seminorms and
// the quasi-isometry check for the hodograph coordinate change.

#include <cstdint>
#include <utility>
#include <vector>

#include "dnwave/grid.hpp"

namespace dnwave {

struct Point {
  double t = 0.0;  ///< tangential coordinate
  double n = 0.0;  ///< normal coordinate, >= 0
};

/// |z - z'| / (sqrt(z_n) + sqrt(z'_n) + sqrt(|z - z'|)); zero iff z == z'.
double cc_distance(const Point& a, const Point& b);

/// Same as cc_distance with the tangential difference taken as the minimal periodic image.
double cc_distance_periodic(const Point& a, const Point& b, double period);

struct Ball {
  std::vector<std::size_t> cells;
  /// Lebesgue measure: cell count times cell volume.
  double volume = 0.0;
};

/// Cells whose centres satisfy cc_distance(centre, centre_hat) < r (periodic
/// tangentially). Throws GridError if the ball contains no cell centre.
Ball cc_ball(const HalfSpaceGrid& grid, const Point& centre_hat, double r);
/// Non-throwing variant; returns an empty ball below resolution.
Ball cc_ball_or_empty(const HalfSpaceGrid& grid, const Point& centre_hat, double r);

/// Parabolic cylinder Q_r(z_hat) = (r^2/2, r^2) x B_r(z_hat).
struct Cylinder {
  double r = 0.0;
  Point centre;
  Ball ball;

  double t_lo() const { return 0.5 * r * r; }
  double t_hi() const { return r * r; }
  double measure() const { return 0.5 * r * r * ball.volume; }
};

/// sup over cells of |grad w|.
double lipschitz_seminorm(const ScalarField& w);
/// sup over cells and snapshots of |grad w|.
double lipschitz_seminorm(const FieldSequence& seq);

struct RatioRange {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
};

/// Extremes of |y - y_hat| / |x - x_hat| with y = (x', zeta(x)) over the given
/// pairs of cell indices (storage order) of a zeta field on an x-grid.
RatioRange quasi_isometry_ratio(const ScalarField& zeta,
                                const std::vector<std::pair<std::size_t, std::size_t>>& pairs);
/// Same over `count` random pairs of distinct cells drawn with `seed`, from
/// normal rows >= first_row.
RatioRange quasi_isometry_ratio(const ScalarField& zeta, std::size_t count, std::uint64_t seed,
                                int first_row = 0);

}  // namespace dnwave
