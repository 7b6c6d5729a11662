#pragma once

#include <cstddef>
#include <optional>
#include <variant>
#include <vector>

#include "wkam/grid.hpp"
#include "wkam/measures.hpp"
#include "wkam/models.hpp"
#include "wkam/problem.hpp"

namespace wkam {

/// tau * L_m(x, (y - x) / tau), with y - x the minimal-norm lift.
double discrete_action(const EffectiveLagrangian& lm, double tau, const Point& x, const Point& y);

/// Same, but refuses displacements outside the window (OutOfWindowError).
double discrete_action(const EffectiveLagrangian& lm, const VelocityWindow& window, const Point& x, const Point& y);

/// The discrete action tabulated on grid x window: cost(x, s) is the action
/// of the step from x to x + offsets[s] h.
class ActionTable {
 public:
  ActionTable(const EffectiveLagrangian& lm, const VelocityWindow& window);

  const TorusGrid& grid() const noexcept { return window_.grid(); }
  const VelocityWindow& window() const noexcept { return window_; }
  double tau() const noexcept { return window_.tau(); }
  std::size_t slot_count() const noexcept { return slots_; }

  double cost(std::size_t source, std::size_t slot) const { return cost_[source * slots_ + slot]; }
  /// L_m at the base point and velocity of the step.
  double lagrangian(std::size_t source, std::size_t slot) const { return lagrangian_[source * slots_ + slot]; }
  /// Base point x with x + offsets[slot] h == target.
  std::size_t source(std::size_t target, std::size_t slot) const { return source_[target * slots_ + slot]; }
  double potential(std::size_t point) const { return potential_[point]; }

  /// max{ max_x L_m(x, 0), -min_{x,v} L_m(x, v) } over the tabulated steps.
  double c0() const;

 private:
  VelocityWindow window_;
  std::size_t slots_;
  std::vector<double> lagrangian_;
  std::vector<double> cost_;
  std::vector<std::size_t> source_;
  std::vector<double> potential_;
};

struct Discounted {
  double lambda;
};

struct Ergodic {
  double lbar;
};

/// Which fixed point equation a value function is calibrated against.
using Regime = std::variant<Discounted, Ergodic>;

/// (1 - tau lambda) u(x) + L(x, y) minimized over the window around each y.
/// Optionally counts targets whose minimizer sits on the window boundary.
GridFunction apply_discounted_operator(const GridFunction& u, const ActionTable& table, double lambda,
                                       std::size_t* boundary_argmins = nullptr);
GridFunction apply_discounted_operator(const GridFunction& u, const EffectiveLagrangian& lm, double lambda,
                                       const VelocityWindow& window);

/// u(x) + L(x, y) minimized over the window around each y.
GridFunction apply_ergodic_operator(const GridFunction& u, const ActionTable& table,
                                    std::size_t* boundary_argmins = nullptr);

struct SolveReport {
  std::size_t iterations = 0;
  double final_residual = 0.0;
  std::vector<double> residual_history;
  std::vector<double> contraction_estimates;
  double c0 = 0.0;
  double c0_bound = 0.0;  // C0 / lambda, discounted only
  double lbar = 0.0;      // ergodic only
  bool ergodic = false;
  int window_radius = 0;
  std::size_t boundary_argmins = 0;
  int escalations = 0;
  bool converged = false;
};

struct ValueIterationOptions {
  double tol = 1e-10;
  std::size_t max_iters = 2'000'000;
};

struct ValueSolution {
  GridFunction u;
  SolveReport report;
  VelocityWindow window;
};

/// Jacobi value iteration for the discounted equation on a fixed table.
/// Throws DivergenceError when max_iters is exhausted.
std::pair<GridFunction, SolveReport> solve_discounted(const ActionTable& table, double lambda,
                                                      const ValueIterationOptions& options,
                                                      std::optional<GridFunction> init = std::nullopt);

/// Relative value iteration u <- T0 u - (T0 u)(x_ref); stops when the span
/// of T0 u - u is below tol. The report carries lbar.
std::pair<GridFunction, SolveReport> solve_ergodic(const ActionTable& table, const ValueIterationOptions& options,
                                                   std::size_t x_ref = 0);

/// Solves with the spec's window, or with the pilot-based default window
/// escalated (x1.5, at most 3 times) while boundary argmins remain.
ValueSolution solve_discounted(const ProblemSpec& spec, const GridMeasure& m);
ValueSolution solve_ergodic(const ProblemSpec& spec, const GridMeasure& m);

/// Argmin predecessor of every grid point for a converged u.
class CalibrationMap {
 public:
  CalibrationMap(const ActionTable& table, const GridFunction& u, const Regime& regime);

  const VelocityWindow& window() const noexcept { return window_; }
  std::size_t predecessor(std::size_t y) const { return pred_[y]; }
  std::size_t slot(std::size_t y) const { return slot_[y]; }
  double defect(std::size_t y) const { return defect_[y]; }
  double max_defect() const;
  std::size_t boundary_argmins() const noexcept { return boundary_; }

 private:
  VelocityWindow window_;
  std::vector<std::size_t> pred_;
  std::vector<std::size_t> slot_;
  std::vector<double> defect_;
  std::size_t boundary_ = 0;
};

/// Backward sequence x0, x_{-1}, ..., x_{-n}. slots[k-1] is the velocity slot
/// of the step x_{-k} -> x_{-k+1}, defects[k-1] its calibration defect.
struct CalibratedOrbit {
  VelocityWindow window;
  std::vector<std::size_t> points;
  std::vector<std::size_t> slots;
  std::vector<double> defects;

  std::size_t steps() const noexcept { return slots.size(); }
  Point velocity(std::size_t k) const { return window.velocity(slots.at(k - 1)); }
};

/// Throws CalibrationError if a step defect exceeds 10 * tol.
CalibratedOrbit trace_orbit(const CalibrationMap& map, std::size_t x0, std::size_t n_steps, double tol);
CalibratedOrbit backward_orbit(const ActionTable& table, const GridFunction& u, const Regime& regime,
                               std::size_t x0, std::size_t n_steps, double tol);

/// Checks tau, lambda and the window constraint tau * lambda < 1.
void validate_discount(double tau, double lambda);

}  // namespace wkam
