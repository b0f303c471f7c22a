#pragma once

// Carleson-type (semi-)norms X(q) and Y(q) built from L^q averages over the
// parabolic cylinders Q_r(z_hat) = (r^2/2, r^2) x B_r(z_hat) of the
// Carnot-Caratheodory geometry, evaluated on stored snapshot sequences.

#include <map>
#include <string>

#include <nlohmann/json.hpp>

#include "dnwave/geometry.hpp"
#include "dnwave/grid.hpp"

namespace dnwave {

/// Discrete sup lattice. Radii satisfy r^2 = T 2^{-k / levels_per_octave}
/// down to r2_min; centres are every `stride`-th cell in both directions
/// plus every cell of the bottom row.
struct NormLattice {
  int levels_per_octave = 1;
  /// Smallest r^2; 0 picks twice the first positive snapshot time.
  double r2_min = 0.0;
  int stride = 2;

  nlohmann::json to_json() const;
};

struct NormComponent {
  double value = 0.0;
  double r = 0.0;
  Point z_hat;
};

struct NormReport {
  double q = 0.0;
  double T = 0.0;
  double lipschitz = 0.0;
  /// Keys: "grad_sup", "sqrt_t_zn_hess_sup", "E(0,0,1)", "E(0,1,0)", "E(1,0,2)".
  std::map<std::string, NormComponent> x_components;
  /// Keys: "beta0", "beta1".
  std::map<std::string, NormComponent> y_components;
  NormLattice lattice;

  double x_total() const;
  double y_total() const;
  double carleson_total() const;
  nlohmann::json to_json() const;
};

/// ||f||_{Y(q)} and its two components.
NormReport y_norm(const FieldSequence& f, double q, double T, const NormLattice& lattice = {});

/// ||w||_{X(q)}: sup terms and the three Carleson components indexed by E.
NormReport x_norm(const FieldSequence& w, double q, double T, const NormLattice& lattice = {});

/// Pointwise nonuniform centred time derivative of a sequence at snapshot k
/// (one-sided at the ends).
ScalarField time_derivative(const FieldSequence& seq, std::size_t k);

}  // namespace dnwave
