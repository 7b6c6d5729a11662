#include "wkam/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "wkam/errors.hpp"

namespace wkam {

namespace {

int wrap_index(long long k, int n) {
  long long r = k % n;
  if (r < 0) r += n;
  return static_cast<int>(r);
}

}  // namespace

TorusGrid::TorusGrid(int dim, int n) : dim_(dim), n_(n), size_(0) {
  if (dim != 1 && dim != 2) throw ShapeError("torus dimension must be 1 or 2, got " + std::to_string(dim));
  if (n < 2) throw ShapeError("grid needs at least 2 points per axis, got " + std::to_string(n));
  size_ = dim == 1 ? static_cast<std::size_t>(n) : static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
}

Offset TorusGrid::coords(std::size_t index) const {
  if (dim_ == 1) return {static_cast<int>(index), 0};
  return {static_cast<int>(index / n_), static_cast<int>(index % n_)};
}

std::size_t TorusGrid::index(Offset c) const {
  if (dim_ == 1) return static_cast<std::size_t>(wrap_index(c[0], n_));
  return static_cast<std::size_t>(wrap_index(c[0], n_)) * n_ + static_cast<std::size_t>(wrap_index(c[1], n_));
}

Point TorusGrid::point(std::size_t index) const {
  const Offset c = coords(index);
  const double h = spacing();
  return {c[0] * h, dim_ == 2 ? c[1] * h : 0.0};
}

std::size_t TorusGrid::nearest(const Point& x) const {
  Offset c{0, 0};
  for (int a = 0; a < dim_; ++a) {
    const double r = x[a] - std::floor(x[a]);
    c[a] = static_cast<int>(std::floor(r * n_ + 0.5));
  }
  return index(c);
}

std::size_t TorusGrid::shift(std::size_t idx, Offset offset) const {
  Offset c = coords(idx);
  for (int a = 0; a < dim_; ++a) c[a] += offset[a];
  return index(c);
}

Offset TorusGrid::displacement(std::size_t from, std::size_t to) const {
  const Offset a = coords(from);
  const Offset b = coords(to);
  Offset d{0, 0};
  for (int ax = 0; ax < dim_; ++ax) {
    int k = wrap_index(b[ax] - a[ax], n_);
    if (k > max_lift()) k -= n_;
    d[ax] = k;
  }
  return d;
}

double TorusGrid::distance(const Point& a, const Point& b) const {
  double s = 0.0;
  for (int ax = 0; ax < dim_; ++ax) {
    const double d = wrap_difference(b[ax] - a[ax]);
    s += d * d;
  }
  return std::sqrt(s);
}

double TorusGrid::distance(std::size_t a, std::size_t b) const {
  const Offset d = displacement(a, b);
  const double h = spacing();
  double s = 0.0;
  for (int ax = 0; ax < dim_; ++ax) s += (d[ax] * h) * (d[ax] * h);
  return std::sqrt(s);
}

double wrap_difference(double d) {
  double r = d - std::floor(d);  // [0, 1)
  if (r > 0.5) r -= 1.0;
  return r;
}

VelocityWindow::VelocityWindow(const TorusGrid& grid, int radius_steps, double tau)
    : grid_(grid), radius_(radius_steps), tau_(tau), lo_(0), hi_(0) {
  if (radius_steps < 1) throw ShapeError("velocity window radius must be >= 1");
  if (!(tau > 0.0)) throw InvalidSpecError("tau must be positive");
  lo_ = std::max(-radius_steps, grid.min_lift());
  hi_ = std::min(radius_steps, grid.max_lift());
  if (grid.dim() == 1) {
    for (int k = lo_; k <= hi_; ++k) offsets_.push_back({k, 0});
  } else {
    for (int k0 = lo_; k0 <= hi_; ++k0)
      for (int k1 = lo_; k1 <= hi_; ++k1) offsets_.push_back({k0, k1});
  }
}

std::optional<std::size_t> VelocityWindow::slot_of(Offset offset) const {
  const int width = hi_ - lo_ + 1;
  for (int a = 0; a < grid_.dim(); ++a)
    if (offset[a] < lo_ || offset[a] > hi_) return std::nullopt;
  if (grid_.dim() == 1) return static_cast<std::size_t>(offset[0] - lo_);
  return static_cast<std::size_t>((offset[0] - lo_) * width + (offset[1] - lo_));
}

std::size_t VelocityWindow::zero_slot() const { return *slot_of({0, 0}); }

Point VelocityWindow::velocity(std::size_t slot) const {
  const Offset& k = offsets_[slot];
  const double step = grid_.spacing() / tau_;
  return {k[0] * step, grid_.dim() == 2 ? k[1] * step : 0.0};
}

double VelocityWindow::max_speed() const noexcept { return radius_ * grid_.spacing() / tau_; }

bool VelocityWindow::is_full() const noexcept { return lo_ == grid_.min_lift() && hi_ == grid_.max_lift(); }

bool VelocityWindow::on_boundary(std::size_t slot) const {
  if (is_full()) return false;
  const Offset& k = offsets_[slot];
  for (int a = 0; a < grid_.dim(); ++a)
    if (k[a] == radius_ || k[a] == -radius_) return true;
  return false;
}

GridFunction::GridFunction(const TorusGrid& grid, double fill) : grid_(grid), values_(grid.size(), fill) {}

GridFunction::GridFunction(const TorusGrid& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size())
    throw ShapeError("grid function has " + std::to_string(values_.size()) + " values, grid has " +
                     std::to_string(grid_.size()) + " points");
}

GridFunction GridFunction::sample(const TorusGrid& grid, const std::function<double(const Point&)>& f) {
  GridFunction out(grid);
  for (std::size_t i = 0; i < grid.size(); ++i) out.values_[i] = f(grid.point(i));
  return out;
}

double GridFunction::sup_norm() const {
  double s = 0.0;
  for (double v : values_) s = std::max(s, std::abs(v));
  return s;
}

double GridFunction::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFunction::max() const { return *std::max_element(values_.begin(), values_.end()); }

double GridFunction::lipschitz_constant() const {
  double best = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    for (int a = 0; a < grid_.dim(); ++a) {
      Offset step{0, 0};
      step[a] = 1;
      best = std::max(best, std::abs(values_[grid_.shift(i, step)] - values_[i]));
    }
  }
  return best / grid_.spacing();
}

GridFunction& GridFunction::operator+=(double c) {
  for (double& v : values_) v += c;
  return *this;
}

double sup_distance(const GridFunction& a, const GridFunction& b) {
  if (a.grid() != b.grid()) throw ShapeError("sup_distance: grids differ");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
  return s;
}

double gauge_distance(const GridFunction& a, const GridFunction& b) {
  if (a.grid() != b.grid()) throw ShapeError("gauge_distance: grids differ");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t i = 0; i < a.size(); ++i) {
    lo = std::min(lo, a[i] - b[i]);
    hi = std::max(hi, a[i] - b[i]);
  }
  return 0.5 * (hi - lo);
}

}  // namespace wkam
