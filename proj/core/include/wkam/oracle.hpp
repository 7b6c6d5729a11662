#pragma once

#include <cstddef>
#include <vector>

#include "wkam/grid.hpp"

namespace wkam {

/// Closed-form values for H = |p|^2 / 2, F(x, m) = f + g(x).
class AppendixBOracle {
 public:
  AppendixBOracle(double f_const, GridFunction g, double lambda);

  double f_const() const noexcept { return f_; }
  const GridFunction& g() const noexcept { return g_; }
  double lambda() const noexcept { return lambda_; }

  /// (f + min g) / lambda.
  double value_at_minimizer() const;
  /// Every solution dominates (f + min g) / lambda pointwise.
  double global_lower_bound(const Point& x) const;
  /// c(m) = -(f + min g).
  double critical_value() const;

  /// Grid indices attaining min g exactly.
  std::vector<std::size_t> minimizers() const;
  /// max_x (bound - u(x)), positive when u dips below the bound.
  double lower_bound_violation(const GridFunction& u) const;

 private:
  double f_;
  GridFunction g_;
  double lambda_;
};

}  // namespace wkam
