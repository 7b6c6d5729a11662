#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace wkam {

/// Point of the torus or velocity vector. Only the first `dim` components are
/// meaningful; the rest are kept at zero.
using Point = std::array<double, 2>;

/// Integer lattice displacement, one entry per axis.
using Offset = std::array<int, 2>;

/// Uniform grid {k/N} on the flat torus T^d, d in {1, 2}. Points are indexed
/// row-major, so index order is lexicographic order of the coordinates.
class TorusGrid {
 public:
  TorusGrid(int dim, int n);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double spacing() const noexcept { return 1.0 / n_; }
  std::size_t size() const noexcept { return size_; }

  Offset coords(std::size_t index) const;
  std::size_t index(Offset coords) const;  // wraps modulo n
  Point point(std::size_t index) const;
  std::size_t nearest(const Point& x) const;
  std::size_t shift(std::size_t index, Offset offset) const;

  /// Minimal-norm lift of `to - from`, each component in (-n/2, n/2].
  Offset displacement(std::size_t from, std::size_t to) const;

  /// Geodesic distance on the torus.
  double distance(const Point& a, const Point& b) const;
  double distance(std::size_t a, std::size_t b) const;

  /// Smallest and largest admissible lift component: (-n/2, n/2].
  int min_lift() const noexcept { return -((n_ - 1) / 2); }
  int max_lift() const noexcept { return n_ / 2; }

  bool operator==(const TorusGrid&) const = default;

 private:
  int dim_;
  int n_;
  std::size_t size_;
};

/// Wraps a coordinate difference into (-1/2, 1/2].
double wrap_difference(double d);

/// Admissible one-step displacements {k h : |k_i| <= W}, i.e. velocities
/// k h / tau. Tying velocities to the lattice makes x + tau v a grid point.
class VelocityWindow {
 public:
  VelocityWindow(const TorusGrid& grid, int radius_steps, double tau);

  const TorusGrid& grid() const noexcept { return grid_; }
  int radius_steps() const noexcept { return radius_; }
  double tau() const noexcept { return tau_; }

  /// Offsets in lexicographic order; slot i refers to offsets()[i].
  const std::vector<Offset>& offsets() const noexcept { return offsets_; }
  std::size_t slot_count() const noexcept { return offsets_.size(); }
  std::optional<std::size_t> slot_of(Offset offset) const;
  std::size_t zero_slot() const;

  Point velocity(std::size_t slot) const;
  /// Per-axis speed bound W h / tau.
  double max_speed() const noexcept;

  /// True when the window already contains every lift on the torus.
  bool is_full() const noexcept;
  /// True when the slot touches the window edge of a window that is not full.
  bool on_boundary(std::size_t slot) const;

  bool operator==(const VelocityWindow&) const = default;

 private:
  TorusGrid grid_;
  int radius_;
  double tau_;
  int lo_;
  int hi_;
  std::vector<Offset> offsets_;
};

/// Real values on grid points: value functions u, potentials g, F(., m).
class GridFunction {
 public:
  explicit GridFunction(const TorusGrid& grid, double fill = 0.0);
  GridFunction(const TorusGrid& grid, std::vector<double> values);

  static GridFunction sample(const TorusGrid& grid, const std::function<double(const Point&)>& f);

  const TorusGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }

  double sup_norm() const;
  double min() const;
  double max() const;
  /// Largest |u(x) - u(y)| / h over grid neighbours along each axis.
  double lipschitz_constant() const;

  GridFunction& operator+=(double c);

 private:
  TorusGrid grid_;
  std::vector<double> values_;
};

double sup_distance(const GridFunction& a, const GridFunction& b);

/// min_c ||a - b - c||_inf, i.e. half the span of a - b.
double gauge_distance(const GridFunction& a, const GridFunction& b);

}  // namespace wkam
