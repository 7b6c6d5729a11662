#include "wkam/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "wkam/errors.hpp"

namespace wkam {

namespace {

constexpr double kMassTolerance = 1e-12;

void check_probability(const std::vector<double>& w, const char* what) {
  double total = 0.0;
  for (double x : w) {
    if (!(x >= 0.0) || !std::isfinite(x)) throw InvalidSpecError(std::string(what) + ": weights must be finite and nonnegative");
    total += x;
  }
  if (std::abs(total - 1.0) > kMassTolerance)
    throw InvalidSpecError(std::string(what) + ": total mass " + std::to_string(total) + " is not 1");
}

}  // namespace

GridMeasure::GridMeasure(const TorusGrid& grid, std::vector<double> weights) : grid_(grid), weights_(std::move(weights)) {
  if (weights_.size() != grid_.size()) throw ShapeError("grid measure size does not match grid");
  check_probability(weights_, "grid measure");
}

GridMeasure GridMeasure::uniform(const TorusGrid& grid) {
  return GridMeasure(grid, std::vector<double>(grid.size(), 1.0 / static_cast<double>(grid.size())));
}

GridMeasure GridMeasure::dirac(const TorusGrid& grid, std::size_t index) {
  std::vector<double> w(grid.size(), 0.0);
  w.at(index) = 1.0;
  return GridMeasure(grid, std::move(w));
}

GridMeasure GridMeasure::normalized(const TorusGrid& grid, std::vector<double> weights) {
  double total = 0.0;
  for (double x : weights) total += x;
  if (!(total > 0.0)) throw InvalidSpecError("cannot normalize a measure with zero mass");
  for (double& x : weights) x /= total;
  return GridMeasure(grid, std::move(weights));
}

GridMeasure GridMeasure::mix(const GridMeasure& a, const GridMeasure& b, double theta) {
  if (a.grid() != b.grid()) throw ShapeError("mix: grids differ");
  std::vector<double> w(a.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = (1.0 - theta) * a[i] + theta * b[i];
  return normalized(a.grid(), std::move(w));
}

std::vector<std::size_t> GridMeasure::support() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if (weights_[i] > 0.0) out.push_back(i);
  return out;
}

PhaseMeasure::PhaseMeasure(const VelocityWindow& window, std::vector<double> weights)
    : window_(window), weights_(std::move(weights)) {
  if (weights_.size() != window_.grid().size() * window_.slot_count())
    throw ShapeError("phase measure size does not match grid x window");
  check_probability(weights_, "phase measure");
}

PhaseMeasure PhaseMeasure::from_atoms(const VelocityWindow& window, const std::vector<PhaseAtom>& atoms) {
  std::vector<double> w(window.grid().size() * window.slot_count(), 0.0);
  for (const auto& a : atoms) {
    if (a.point >= window.grid().size() || a.slot >= window.slot_count()) throw ShapeError("phase atom outside grid x window");
    w[a.point * window.slot_count() + a.slot] += a.weight;
  }
  return PhaseMeasure(window, std::move(w));
}

PhaseMeasure PhaseMeasure::average(const std::vector<PhaseMeasure>& parts, const std::vector<double>& coefficients) {
  if (parts.empty() || parts.size() != coefficients.size()) throw LengthError("average: need one coefficient per measure");
  double total = 0.0;
  for (double c : coefficients) total += c;
  if (!(total > 0.0)) throw InvalidSpecError("average: coefficients sum to zero");
  std::vector<double> w(parts.front().weights().size(), 0.0);
  for (std::size_t p = 0; p < parts.size(); ++p) {
    if (!(parts[p].window() == parts.front().window())) throw ShapeError("average: windows differ");
    const double c = coefficients[p] / total;
    if (c == 0.0) continue;
    const auto& src = parts[p].weights();
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += c * src[i];
  }
  double mass = 0.0;
  for (double x : w) mass += x;
  for (double& x : w) x /= mass;
  return PhaseMeasure(parts.front().window(), std::move(w));
}

std::vector<PhaseAtom> PhaseMeasure::atoms() const {
  std::vector<PhaseAtom> out;
  const std::size_t k = window_.slot_count();
  for (std::size_t i = 0; i < weights_.size(); ++i)
    if (weights_[i] > 0.0) out.push_back({i / k, i % k, weights_[i]});
  return out;
}

GridMeasure pushforward(const PhaseMeasure& mu) {
  const std::size_t k = mu.window().slot_count();
  std::vector<double> w(mu.grid().size(), 0.0);
  for (std::size_t p = 0; p < w.size(); ++p) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j) s += mu.weights()[p * k + j];
    w[p] = s;
  }
  return GridMeasure(mu.grid(), std::move(w));
}

double holonomy_residual(const PhaseMeasure& mu, const std::vector<GridFunction>& test_functions) {
  const auto atoms = mu.atoms();
  const auto& offsets = mu.window().offsets();
  double worst = 0.0;
  for (const auto& phi : test_functions) {
    if (phi.grid() != mu.grid()) throw ShapeError("holonomy_residual: test function on another grid");
    double s = 0.0;
    for (const auto& a : atoms) {
      const std::size_t target = mu.grid().shift(a.point, offsets[a.slot]);
      s += a.weight * (phi[target] - phi[a.point]);
    }
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

GridFunction holonomy_imbalance(const PhaseMeasure& mu) {
  GridFunction flow(mu.grid());
  const auto& offsets = mu.window().offsets();
  for (const auto& a : mu.atoms()) {
    flow[mu.grid().shift(a.point, offsets[a.slot])] += a.weight;
    flow[a.point] -= a.weight;
  }
  return flow;
}

double holonomy_residual(const PhaseMeasure& mu) {
  const double indicators = holonomy_imbalance(mu).sup_norm();
  return std::max(indicators, holonomy_residual(mu, fourier_test_functions(mu.grid(), 2)));
}

std::vector<GridFunction> fourier_test_functions(const TorusGrid& grid, int modes) {
  std::vector<GridFunction> out;
  for (int a = 0; a < grid.dim(); ++a) {
    for (int k = 1; k <= modes; ++k) {
      const double w = 2.0 * std::numbers::pi * k;
      out.push_back(GridFunction::sample(grid, [=](const Point& x) { return std::sin(w * x[a]); }));
      out.push_back(GridFunction::sample(grid, [=](const Point& x) { return std::cos(w * x[a]); }));
    }
  }
  return out;
}

std::vector<GridFunction> indicator_test_functions(const TorusGrid& grid) {
  std::vector<GridFunction> out;
  out.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    GridFunction phi(grid);
    phi[i] = 1.0;
    out.push_back(std::move(phi));
  }
  return out;
}

std::vector<GridFunction> default_test_functions(const TorusGrid& grid) {
  auto out = indicator_test_functions(grid);
  for (auto& f : fourier_test_functions(grid, 2)) out.push_back(std::move(f));
  return out;
}

}  // namespace wkam
