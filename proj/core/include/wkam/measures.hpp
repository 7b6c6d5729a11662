#pragma once

#include <cstddef>
#include <vector>

#include "wkam/grid.hpp"

namespace wkam {

/// Probability weights on the points of a torus grid.
class GridMeasure {
 public:
  /// Validates nonnegativity and unit mass (within 1e-12).
  GridMeasure(const TorusGrid& grid, std::vector<double> weights);

  static GridMeasure uniform(const TorusGrid& grid);
  static GridMeasure dirac(const TorusGrid& grid, std::size_t index);
  /// Divides by the total mass; throws if the mass is not positive.
  static GridMeasure normalized(const TorusGrid& grid, std::vector<double> weights);
  /// (1 - theta) a + theta b, renormalized.
  static GridMeasure mix(const GridMeasure& a, const GridMeasure& b, double theta);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return weights_.size(); }
  double operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Indices carrying positive mass, ascending.
  std::vector<std::size_t> support() const;

 private:
  TorusGrid grid_;
  std::vector<double> weights_;
};

struct PhaseAtom {
  std::size_t point;
  std::size_t slot;
  double weight;
};

/// Probability weights on (grid point, window velocity) pairs, stored
/// point-major and velocity-minor.
class PhaseMeasure {
 public:
  PhaseMeasure(const VelocityWindow& window, std::vector<double> weights);

  /// Sums repeated atoms, then validates.
  static PhaseMeasure from_atoms(const VelocityWindow& window, const std::vector<PhaseAtom>& atoms);
  /// Convex combination with the given nonnegative coefficients (normalized).
  static PhaseMeasure average(const std::vector<PhaseMeasure>& parts, const std::vector<double>& coefficients);

  const TorusGrid& grid() const noexcept { return window_.grid(); }
  const VelocityWindow& window() const noexcept { return window_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  double weight(std::size_t point, std::size_t slot) const { return weights_[point * window_.slot_count() + slot]; }

  /// Nonzero atoms in storage order.
  std::vector<PhaseAtom> atoms() const;

 private:
  VelocityWindow window_;
  std::vector<double> weights_;
};

/// Projection onto the base point: weight(x) = sum over v of mu(x, v).
GridMeasure pushforward(const PhaseMeasure& mu);

/// max over test functions of |sum mu(x,v) (phi(x + tau v) - phi(x))|.
double holonomy_residual(const PhaseMeasure& mu, const std::vector<GridFunction>& test_functions);

/// Same quantity for the default family: every point indicator plus the first
/// two Fourier modes per axis. Indicators are handled through the net flow.
double holonomy_residual(const PhaseMeasure& mu);

/// Mass arriving at each point minus mass leaving it.
GridFunction holonomy_imbalance(const PhaseMeasure& mu);

/// sin and cos of 2 pi k x_a for k = 1..modes on each axis.
std::vector<GridFunction> fourier_test_functions(const TorusGrid& grid, int modes);
std::vector<GridFunction> indicator_test_functions(const TorusGrid& grid);
std::vector<GridFunction> default_test_functions(const TorusGrid& grid);

}  // namespace wkam
