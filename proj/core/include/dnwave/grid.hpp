#pragma once

// Structured cell-centred grids on a half-space slab, scalar fields,
// finite-difference derivative stencils, and refinement/restriction.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "dnwave/model.hpp"

namespace dnwave {

/// A slab {z_min < z_n < z_max} with an optional periodic tangential
/// direction of length `tangential_extent`. Cell (j, i) has tangential index
/// j and normal index i; storage is normal-fastest.
class HalfSpaceGrid {
 public:
  static HalfSpaceGrid one_d(double z_max, int n_normal, double z_min = 0.0);
  static HalfSpaceGrid two_d(double z_max, int n_normal, double tangential_extent,
                             int n_tangential, double z_min = 0.0);

  int dim() const { return dim_; }
  double z_min() const { return z_min_; }
  double z_max() const { return z_max_; }
  int n_normal() const { return n_normal_; }
  int n_tangential() const { return n_tangential_; }
  double tangential_extent() const { return tangential_extent_; }

  double h_normal() const { return (z_max_ - z_min_) / n_normal_; }
  /// Tangential spacing; 1 for one-dimensional grids so that cell volumes stay h_normal.
  double h_tangential() const { return dim_ == 2 ? tangential_extent_ / n_tangential_ : 1.0; }
  double h_min() const;
  double cell_volume() const { return h_normal() * h_tangential(); }

  double normal_center(int i) const { return z_min_ + (i + 0.5) * h_normal(); }
  double tangential_center(int j) const { return dim_ == 2 ? (j + 0.5) * h_tangential() : 0.0; }

  std::size_t size() const { return static_cast<std::size_t>(n_normal_) * n_tangential_; }
  std::size_t index(int j, int i) const {
    return static_cast<std::size_t>(j) * n_normal_ + i;
  }
  int wrap(int j) const { return ((j % n_tangential_) + n_tangential_) % n_tangential_; }

  /// Same slab with spacings halved in every direction.
  HalfSpaceGrid refined() const;
  /// Same slab with spacings doubled; requires even cell counts.
  HalfSpaceGrid coarsened() const;
  /// Same cell counts, tangential extent multiplied by `factor`.
  HalfSpaceGrid with_tangential_scale(double factor) const;

  bool operator==(const HalfSpaceGrid&) const = default;

 private:
  HalfSpaceGrid(int dim, double z_min, double z_max, int n_normal, double extent, int n_tangential);

  int dim_;
  double z_min_;
  double z_max_;
  int n_normal_;
  double tangential_extent_;
  int n_tangential_;
};

/// Immutable snapshot of cell values at a time.
class ScalarField {
 public:
  ScalarField(HalfSpaceGrid grid, std::vector<double> values, double time = 0.0);

  /// Samples f(z_tangential, z_normal) at cell centres.
  static ScalarField from_function(const HalfSpaceGrid& grid,
                                   const std::function<double(double, double)>& f,
                                   double time = 0.0);
  static ScalarField zeros(const HalfSpaceGrid& grid, double time = 0.0);

  const HalfSpaceGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  double time() const { return time_; }
  double operator()(int j, int i) const { return values_[grid_.index(j, i)]; }

  ScalarField with_time(double time) const;
  double max_abs() const;
  /// Volume average over the slab.
  double mean() const;
  /// Sum of value * cell volume.
  double integral() const;

 private:
  HalfSpaceGrid grid_;
  std::vector<double> values_;
  double time_;
};

/// Snapshots with strictly increasing times on one shared grid.
class FieldSequence {
 public:
  FieldSequence() = default;
  explicit FieldSequence(std::vector<ScalarField> fields);

  void push_back(ScalarField field);

  bool empty() const { return fields_.empty(); }
  std::size_t size() const { return fields_.size(); }
  const ScalarField& operator[](std::size_t k) const { return fields_[k]; }
  const ScalarField& front() const { return fields_.front(); }
  const ScalarField& back() const { return fields_.back(); }
  const HalfSpaceGrid& grid() const { return fields_.front().grid(); }
  std::vector<double> times() const;

  auto begin() const { return fields_.begin(); }
  auto end() const { return fields_.end(); }

 private:
  std::vector<ScalarField> fields_;
};

/// Treatment of the top of the slab by the normal stencils. `OneSided` uses
/// second-order one-sided differences; `Mirror` reflects across the top face
/// (zero normal derivative). The bottom always uses one-sided differences.
enum class TopBoundary { OneSided, Mirror };

struct GradientField {
  ScalarField t;
  ScalarField n;
};

struct HessianField {
  ScalarField tt;
  ScalarField tn;
  ScalarField nn;
};

GradientField gradient(const ScalarField& field, TopBoundary top = TopBoundary::OneSided);
HessianField hessian(const ScalarField& field, TopBoundary top = TopBoundary::OneSided);

/// Jet at cell (j, i); z_n is the normal coordinate of the cell centre.
Jet jet_at(const ScalarField& field, int j, int i, TopBoundary top = TopBoundary::OneSided);
/// Jets of every cell, in storage order.
std::vector<Jet> jets(const ScalarField& field, TopBoundary top = TopBoundary::OneSided);

/// Pointwise |grad f| of a gradient field.
ScalarField magnitude(const GradientField& g);
/// Pointwise Frobenius norm of a Hessian field.
ScalarField magnitude(const HessianField& h);

/// Pointwise Frobenius norm of all third derivatives, by differencing the Hessian.
ScalarField third_derivative_magnitude(const ScalarField& field,
                                       TopBoundary top = TopBoundary::OneSided);

ScalarField refine(const ScalarField& field);
ScalarField restrict_field(const ScalarField& field);

/// Linear interpolation along the normal direction of column j at height z.
/// Returns false when z lies outside [first centre, last centre].
bool interpolate_normal(const ScalarField& field, int j, double z, double& out);

/// Empirical convergence order log2(e_coarse / e_fine).
double convergence_order(double e_coarse, double e_fine);

}  // namespace dnwave
