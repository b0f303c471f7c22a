#pragma once

// Hodograph (von Mises) change of variables: the graph equation
// g(t, y', zeta(t, x)) = x_n swaps the pressure value and the normal coordinate.

#include "dnwave/grid.hpp"

namespace dnwave {

/// For each tangential column of the pressure field g (wave-frame coordinates
/// y) and each normal cell centre x_n of `x_grid`, the height y_n where g
/// crosses x_n, by monotone piecewise-linear inversion. Both grids must have
/// the same tangential columns. Throws MonotonicityError (with the location)
/// when g is not increasing with slope >= `min_slope` on its support, and
/// DomainError when a level lies above the data.
ScalarField hodograph(const ScalarField& g, const HalfSpaceGrid& x_grid,
                      double threshold = 1e-10, double min_slope = 0.1);

/// Inverse transform: g(y) = x_n where zeta(x', x_n) = y_n, and 0 below the
/// free boundary zeta(x', 0) (linear extrapolation of the first two cells).
ScalarField hodograph_inverse(const ScalarField& zeta, const HalfSpaceGrid& y_grid);

}  // namespace dnwave
