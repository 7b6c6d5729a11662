#pragma once

#include <span>

#include "wkam/measures.hpp"

namespace wkam {

/// Kantorovich-Rubinstein (Wasserstein-1) distance with geodesic cost.
/// Exact on T^1; on T^2 an entropic approximation, meant for diagnostics only.
double d1_distance(const GridMeasure& m1, const GridMeasure& m2);

/// Exact W1 between two weight vectors on the uniform N-point circle.
/// Minimizes h * sum_k |D_k - t| over the shift t, where D is the cumulative
/// difference; the optimum is a median of D.
double circle_w1(std::span<const double> a, std::span<const double> b);

struct SinkhornOptions {
  double regularization_factor = 1e-3;  // multiplied by the grid spacing
  int iterations = 500;
};

/// Transport cost <P, C> of the log-domain Sinkhorn plan.
double sinkhorn_w1(const GridMeasure& m1, const GridMeasure& m2, const SinkhornOptions& options = {});

}  // namespace wkam
