#include "wkam/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "wkam/errors.hpp"

namespace wkam {

double circle_w1(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size() || a.empty()) throw ShapeError("circle_w1: size mismatch");
  const std::size_t n = a.size();
  std::vector<double> cumulative(n);
  double running = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    running += a[k] - b[k];
    cumulative[k] = running;
  }
  std::vector<double> sorted = cumulative;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(n / 2), sorted.end());
  const double shift = sorted[n / 2];
  double total = 0.0;
  for (double d : cumulative) total += std::abs(d - shift);
  return total / static_cast<double>(n);
}

double sinkhorn_w1(const GridMeasure& m1, const GridMeasure& m2, const SinkhornOptions& options) {
  if (m1.grid() != m2.grid()) throw ShapeError("sinkhorn_w1: grids differ");
  const TorusGrid& grid = m1.grid();
  const auto src = m1.support();
  const auto dst = m2.support();
  const std::size_t ns = src.size();
  const std::size_t nd = dst.size();
  const double eps = options.regularization_factor * grid.spacing();

  std::vector<double> cost(ns * nd);
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nd; ++j) cost[i * nd + j] = grid.distance(src[i], dst[j]);

  std::vector<double> log_a(ns), log_b(nd), f(ns, 0.0), g(nd, 0.0);
  for (std::size_t i = 0; i < ns; ++i) log_a[i] = std::log(m1[src[i]]);
  for (std::size_t j = 0; j < nd; ++j) log_b[j] = std::log(m2[dst[j]]);

  auto logsumexp = [](const std::vector<double>& v) {
    const double top = *std::max_element(v.begin(), v.end());
    double s = 0.0;
    for (double x : v) s += std::exp(x - top);
    return top + std::log(s);
  };

  std::vector<double> row(nd), col(ns);
  for (int it = 0; it < options.iterations; ++it) {
    for (std::size_t i = 0; i < ns; ++i) {
      for (std::size_t j = 0; j < nd; ++j) row[j] = (g[j] - cost[i * nd + j]) / eps;
      f[i] = eps * (log_a[i] - logsumexp(row));
    }
    for (std::size_t j = 0; j < nd; ++j) {
      for (std::size_t i = 0; i < ns; ++i) col[i] = (f[i] - cost[i * nd + j]) / eps;
      g[j] = eps * (log_b[j] - logsumexp(col));
    }
  }

  double total = 0.0;
  for (std::size_t i = 0; i < ns; ++i)
    for (std::size_t j = 0; j < nd; ++j) {
      const double c = cost[i * nd + j];
      total += std::exp((f[i] + g[j] - c) / eps) * c;
    }
  return total;
}

double d1_distance(const GridMeasure& m1, const GridMeasure& m2) {
  if (m1.grid() != m2.grid()) throw ShapeError("d1_distance: measures live on different grids");
  if (m1.grid().dim() == 1) return circle_w1(m1.weights(), m2.weights());
  return sinkhorn_w1(m1, m2);
}

}  // namespace wkam
