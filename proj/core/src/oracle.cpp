#include "wkam/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "wkam/errors.hpp"

namespace wkam {

AppendixBOracle::AppendixBOracle(double f_const, GridFunction g, double lambda)
    : f_(f_const), g_(std::move(g)), lambda_(lambda) {
  if (!(lambda > 0.0)) throw InvalidSpecError("oracle needs lambda > 0");
  if (!std::isfinite(f_const)) throw EvaluationError("oracle f must be finite");
  for (double v : g_.values())
    if (!std::isfinite(v)) throw EvaluationError("oracle g must be finite");
}

double AppendixBOracle::value_at_minimizer() const { return (f_ + g_.min()) / lambda_; }

double AppendixBOracle::global_lower_bound(const Point&) const { return value_at_minimizer(); }

double AppendixBOracle::critical_value() const { return -(f_ + g_.min()); }

std::vector<std::size_t> AppendixBOracle::minimizers() const {
  const double low = g_.min();
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < g_.size(); ++i)
    if (g_[i] == low) out.push_back(i);
  return out;
}

double AppendixBOracle::lower_bound_violation(const GridFunction& u) const {
  if (u.grid() != g_.grid()) throw ShapeError("oracle and value function use different grids");
  return value_at_minimizer() - u.min();
}

}  // namespace wkam
