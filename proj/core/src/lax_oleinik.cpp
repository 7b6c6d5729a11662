#include "wkam/lax_oleinik.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "wkam/errors.hpp"
#include "wkam/parallel.hpp"
#include "wkam/window.hpp"

namespace wkam {

namespace {

constexpr std::size_t kParallelGrain = 256;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Choice {
  double value = kInf;
  std::size_t source = std::numeric_limits<std::size_t>::max();
  std::size_t slot = 0;
};

// Minimizes factor * u(x) + cost(x, s) over the window around y. Ties go to
// the smallest grid index of x.
inline Choice best_step(const ActionTable& t, const GridFunction& u, double factor, std::size_t y) {
  Choice best;
  const std::size_t k = t.slot_count();
  for (std::size_t s = 0; s < k; ++s) {
    const std::size_t x = t.source(y, s);
    const double v = factor * u[x] + t.cost(x, s);
    if (v < best.value || (v == best.value && x < best.source)) best = {v, x, s};
  }
  return best;
}

GridFunction sweep(const GridFunction& u, const ActionTable& t, double factor, std::size_t* boundary_argmins) {
  if (u.grid() != t.grid()) throw ShapeError("operator: value function and action table use different grids");
  GridFunction out(u.grid());
  std::atomic<std::size_t> boundary{0};
  const auto& window = t.window();
  const bool track = boundary_argmins != nullptr && !window.is_full();
  parallel_for(u.size(), kParallelGrain, [&](std::size_t begin, std::size_t end) {
    std::size_t local = 0;
    for (std::size_t y = begin; y < end; ++y) {
      const Choice c = best_step(t, u, factor, y);
      out[y] = c.value;
      if (track && window.on_boundary(c.slot)) ++local;
    }
    boundary += local;
  });
  if (boundary_argmins != nullptr) *boundary_argmins = boundary.load();
  return out;
}

template <typename SolveOnce, typename CountBoundary>
ValueSolution solve_with_window(const ProblemSpec& spec, const GridMeasure& m, SolveOnce&& solve_once,
                                CountBoundary&& count_boundary) {
  spec.validate();
  if (m.grid() != spec.grid) throw ShapeError("measure grid does not match the problem grid");
  const bool automatic = spec.window_radius == 0;
  int radius = automatic ? default_window_radius(spec, m) : spec.window_radius;
  const EffectiveLagrangian lm(spec.lagrangian, spec.coupling, m);
  std::optional<GridFunction> warm;
  for (int escalation = 0;; ++escalation) {
    VelocityWindow window(spec.grid, radius, spec.tau);
    const ActionTable table(lm, window);
    auto [u, report] = solve_once(table, warm);
    report.escalations = escalation;
    report.window_radius = radius;
    report.boundary_argmins = count_boundary(table, u);
    if (!automatic || report.boundary_argmins == 0 || window.is_full() || escalation == kMaxWindowEscalations)
      return ValueSolution{std::move(u), std::move(report), window};
    radius = std::max(radius + 1, static_cast<int>(std::ceil(1.5 * radius)));
    warm = std::move(u);
  }
}

}  // namespace

void validate_discount(double tau, double lambda) {
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidSpecError("tau must lie in (0, 1), got " + std::to_string(tau));
  if (!(lambda > 0.0 && lambda <= 1.0)) throw InvalidSpecError("lambda must lie in (0, 1], got " + std::to_string(lambda));
  if (!(tau * lambda < 1.0)) throw InvalidSpecError("tau * lambda must be < 1");
}

double discrete_action(const EffectiveLagrangian& lm, double tau, const Point& x, const Point& y) {
  Point v{0.0, 0.0};
  for (int a = 0; a < lm.dim(); ++a) v[a] = wrap_difference(y[a] - x[a]) / tau;
  return tau * lm.eval(x, v);
}

double discrete_action(const EffectiveLagrangian& lm, const VelocityWindow& window, const Point& x, const Point& y) {
  const double reach = window.radius_steps() * window.grid().spacing();
  for (int a = 0; a < lm.dim(); ++a) {
    const double d = wrap_difference(y[a] - x[a]);
    if (std::abs(d) > reach * (1.0 + 1e-12)) {
      std::ostringstream msg;
      msg << "displacement " << d << " on axis " << a << " exceeds the window reach " << reach << "; widen W";
      throw OutOfWindowError(msg.str());
    }
  }
  return discrete_action(lm, window.tau(), x, y);
}

ActionTable::ActionTable(const EffectiveLagrangian& lm, const VelocityWindow& window)
    : window_(window), slots_(window.slot_count()) {
  const TorusGrid& grid = window.grid();
  if (lm.dim() != grid.dim()) throw ShapeError("Lagrangian dimension does not match the grid");
  const std::size_t n = grid.size();
  const double tau = window.tau();
  lagrangian_.resize(n * slots_);
  cost_.resize(n * slots_);
  source_.resize(n * slots_);
  potential_.resize(n);
  for (std::size_t x = 0; x < n; ++x) {
    const Point p = grid.point(x);
    potential_[x] = lm.potential(p);
    for (std::size_t s = 0; s < slots_; ++s) {
      const Point v = window.velocity(s);
      const double l = lm.base().eval(p, v) + potential_[x];
      if (!std::isfinite(l)) {
        std::ostringstream msg;
        msg << "L_m is not finite at x=(" << p[0] << "," << p[1] << "), v=(" << v[0] << "," << v[1] << ")";
        throw EvaluationError(msg.str());
      }
      lagrangian_[x * slots_ + s] = l;
      cost_[x * slots_ + s] = tau * l;
    }
  }
  const auto& offsets = window.offsets();
  for (std::size_t y = 0; y < n; ++y)
    for (std::size_t s = 0; s < slots_; ++s) source_[y * slots_ + s] = grid.shift(y, {-offsets[s][0], -offsets[s][1]});
}

double ActionTable::c0() const {
  const std::size_t zero = window_.zero_slot();
  double rest = -kInf;
  double lowest = kInf;
  for (std::size_t x = 0; x < grid().size(); ++x) {
    rest = std::max(rest, lagrangian(x, zero));
    for (std::size_t s = 0; s < slots_; ++s) lowest = std::min(lowest, lagrangian(x, s));
  }
  return std::max(rest, -lowest);
}

GridFunction apply_discounted_operator(const GridFunction& u, const ActionTable& table, double lambda,
                                       std::size_t* boundary_argmins) {
  validate_discount(table.tau(), lambda);
  return sweep(u, table, 1.0 - table.tau() * lambda, boundary_argmins);
}

GridFunction apply_discounted_operator(const GridFunction& u, const EffectiveLagrangian& lm, double lambda,
                                       const VelocityWindow& window) {
  return apply_discounted_operator(u, ActionTable(lm, window), lambda);
}

GridFunction apply_ergodic_operator(const GridFunction& u, const ActionTable& table, std::size_t* boundary_argmins) {
  return sweep(u, table, 1.0, boundary_argmins);
}

std::pair<GridFunction, SolveReport> solve_discounted(const ActionTable& table, double lambda,
                                                      const ValueIterationOptions& options,
                                                      std::optional<GridFunction> init) {
  validate_discount(table.tau(), lambda);
  if (!(options.tol > 0.0)) throw InvalidSpecError("value iteration tolerance must be positive");
  GridFunction u = init ? std::move(*init) : GridFunction(table.grid());
  if (u.grid() != table.grid()) throw ShapeError("initial value function uses another grid");
  const double factor = 1.0 - table.tau() * lambda;

  SolveReport report;
  report.c0 = table.c0();
  report.c0_bound = report.c0 / lambda;
  report.window_radius = table.window().radius_steps();
  double previous = 0.0;
  for (std::size_t it = 1; it <= options.max_iters; ++it) {
    GridFunction next = sweep(u, table, factor, nullptr);
    const double change = sup_distance(next, u);
    report.residual_history.push_back(change);
    if (previous > 0.0) report.contraction_estimates.push_back(change / previous);
    previous = change;
    u = std::move(next);
    report.iterations = it;
    report.final_residual = change;
    if (change <= options.tol) {
      report.converged = true;
      return {std::move(u), std::move(report)};
    }
  }
  std::ostringstream msg;
  msg << "discounted value iteration did not reach tol " << options.tol << " within " << options.max_iters
      << " sweeps (last change " << report.final_residual << ")";
  throw DivergenceError(msg.str(), std::move(report.residual_history));
}

std::pair<GridFunction, SolveReport> solve_ergodic(const ActionTable& table, const ValueIterationOptions& options,
                                                   std::size_t x_ref) {
  if (!(options.tol > 0.0)) throw InvalidSpecError("value iteration tolerance must be positive");
  if (x_ref >= table.grid().size()) throw ShapeError("reference point outside the grid");
  GridFunction u(table.grid());
  SolveReport report;
  report.ergodic = true;
  report.c0 = table.c0();
  report.window_radius = table.window().radius_steps();
  double previous = 0.0;
  for (std::size_t it = 1; it <= options.max_iters; ++it) {
    GridFunction next = sweep(u, table, 1.0, nullptr);
    double lo = kInf, hi = -kInf;
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double d = next[i] - u[i];
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
    const double span = hi - lo;
    report.lbar = (next[x_ref] - u[x_ref]) / table.tau();
    report.residual_history.push_back(span);
    if (previous > 0.0) report.contraction_estimates.push_back(span / previous);
    previous = span;
    next += -next[x_ref];
    u = std::move(next);
    report.iterations = it;
    report.final_residual = span;
    if (span <= options.tol) {
      report.converged = true;
      return {std::move(u), std::move(report)};
    }
  }
  std::ostringstream msg;
  msg << "relative value iteration span did not contract below " << options.tol << " within " << options.max_iters
      << " sweeps (last span " << report.final_residual << ")";
  throw DivergenceError(msg.str(), std::move(report.residual_history));
}

ValueSolution solve_discounted(const ProblemSpec& spec, const GridMeasure& m) {
  if (spec.ergodic()) throw InvalidSpecError("solve_discounted needs lambda > 0");
  const ValueIterationOptions options{spec.tolerances.value_tol, spec.tolerances.max_iters};
  return solve_with_window(
      spec, m,
      [&](const ActionTable& table, std::optional<GridFunction>& warm) {
        return solve_discounted(table, spec.lambda, options, warm);
      },
      [&](const ActionTable& table, const GridFunction& u) {
        std::size_t hits = 0;
        apply_discounted_operator(u, table, spec.lambda, &hits);
        return hits;
      });
}

ValueSolution solve_ergodic(const ProblemSpec& spec, const GridMeasure& m) {
  const ValueIterationOptions options{spec.tolerances.ergodic_tol, spec.tolerances.max_iters};
  return solve_with_window(
      spec, m,
      [&](const ActionTable& table, std::optional<GridFunction>&) { return solve_ergodic(table, options, 0); },
      [&](const ActionTable& table, const GridFunction& u) {
        std::size_t hits = 0;
        apply_ergodic_operator(u, table, &hits);
        return hits;
      });
}

CalibrationMap::CalibrationMap(const ActionTable& table, const GridFunction& u, const Regime& regime)
    : window_(table.window()) {
  if (u.grid() != table.grid()) throw ShapeError("calibration: value function and table use different grids");
  double factor = 1.0;
  double shift = 0.0;
  if (const auto* d = std::get_if<Discounted>(&regime)) {
    validate_discount(table.tau(), d->lambda);
    factor = 1.0 - table.tau() * d->lambda;
  } else {
    shift = table.tau() * std::get<Ergodic>(regime).lbar;
  }
  const std::size_t n = u.size();
  pred_.resize(n);
  slot_.resize(n);
  defect_.resize(n);
  for (std::size_t y = 0; y < n; ++y) {
    const Choice c = best_step(table, u, factor, y);
    pred_[y] = c.source;
    slot_[y] = c.slot;
    defect_[y] = std::abs(u[y] + shift - c.value);
    if (window_.on_boundary(c.slot)) ++boundary_;
  }
}

double CalibrationMap::max_defect() const { return *std::max_element(defect_.begin(), defect_.end()); }

CalibratedOrbit trace_orbit(const CalibrationMap& map, std::size_t x0, std::size_t n_steps, double tol) {
  if (x0 >= map.window().grid().size()) throw ShapeError("orbit start outside the grid");
  CalibratedOrbit orbit{map.window(), {x0}, {}, {}};
  orbit.points.reserve(n_steps + 1);
  orbit.slots.reserve(n_steps);
  orbit.defects.reserve(n_steps);
  std::size_t y = x0;
  for (std::size_t k = 1; k <= n_steps; ++k) {
    const double defect = map.defect(y);
    if (defect > 10.0 * tol) {
      std::ostringstream msg;
      msg << "calibration defect " << defect << " at step " << k << " exceeds 10 * tol = " << 10.0 * tol
          << "; the value function is not converged enough";
      throw CalibrationError(msg.str());
    }
    orbit.slots.push_back(map.slot(y));
    orbit.defects.push_back(defect);
    y = map.predecessor(y);
    orbit.points.push_back(y);
  }
  return orbit;
}

CalibratedOrbit backward_orbit(const ActionTable& table, const GridFunction& u, const Regime& regime, std::size_t x0,
                               std::size_t n_steps, double tol) {
  return trace_orbit(CalibrationMap(table, u, regime), x0, n_steps, tol);
}

}  // namespace wkam
