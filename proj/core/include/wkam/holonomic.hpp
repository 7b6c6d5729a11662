#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "wkam/lax_oleinik.hpp"
#include "wkam/measures.hpp"
#include "wkam/problem.hpp"

namespace wkam {

/// Cesaro average of the atoms (x_{-k}, v_{-k}) for burn_in < k <= n.
/// Throws LengthError unless the orbit has more than burn_in + 1 steps.
PhaseMeasure empirical_measure(const CalibratedOrbit& orbit, std::size_t burn_in);

struct MinimizingMeasureReport {
  PhaseMeasure measure;
  double holonomy_defect = 0.0;
  /// sum mu (L_m - lambda u), or sum mu L_m - lbar in the ergodic regime.
  double value_defect = 0.0;
  std::size_t burn_in = 0;
  std::size_t orbit_length = 0;
  double tol_value = 0.0;
  double tol_holonomy = 0.0;
  bool minimizing = false;
};

struct MinimizingTolerances {
  std::optional<double> value;  // default 1e-6 (1 + ||u||_inf)
  double holonomy = 1e-6;
};

/// Report-only check of the defining identities of a minimizing measure.
MinimizingMeasureReport verify_minimizing(const PhaseMeasure& mu, const GridFunction& u, const EffectiveLagrangian& lm,
                                          const Regime& regime, const MinimizingTolerances& tolerances = {});

/// Empirical measure of one calibrated orbit. Burn-in is extended to the
/// entry of the orbit's terminal cycle and the sample count is rounded up to
/// a whole number of periods, so the measure is exactly holonomic.
struct OrbitMeasure {
  PhaseMeasure measure;
  std::size_t burn_in;
  std::size_t samples;
  std::size_t period;
};

OrbitMeasure calibrated_measure(const CalibrationMap& map, std::size_t seed, std::size_t burn_in, std::size_t samples,
                                double tol);

struct AubryAtom {
  std::size_t point;
  std::size_t slot;
  double frequency;
};

/// Orbit-tail approximation of the discrete discounted Aubry set.
struct AubryApproximation {
  VelocityWindow window;
  std::vector<AubryAtom> atoms;  // sorted by (point, slot); frequencies sum to 1

  bool contains(std::size_t point, std::size_t slot) const;
};

AubryApproximation approximate_aubry(const CalibrationMap& map, const std::vector<std::size_t>& seeds,
                                     std::size_t n_steps, std::size_t burn_in, double tol);
AubryApproximation approximate_aubry(const ActionTable& table, const GridFunction& u, const Regime& regime,
                                     const std::vector<std::size_t>& seeds, std::size_t n_steps, std::size_t burn_in,
                                     double tol);

enum class LbarMethod { ergodic, orbit };

/// Effective constant lbar(tau, m): either the eigenvalue of relative value
/// iteration or the mean of L_m under ergodic orbit measures.
double estimate_lbar(const ProblemSpec& spec, const GridMeasure& m, LbarMethod method);

struct CriticalValueRow {
  double tau;
  double lbar;
  int window_radius;
};

/// lbar(tau, m) for each tau (each with its own default window). The limit
/// tau -> 0 estimates -c(m).
std::vector<CriticalValueRow> estimate_critical_value(const ProblemSpec& spec, const GridMeasure& m,
                                                      const std::vector<double>& taus);

/// Richardson estimate of c(m) from lbar at tau and tau / 2:
/// c = -(2 lbar(tau / 2) - lbar(tau)).
double richardson_critical_value(double lbar_tau, double lbar_half_tau);

/// Grid indices of the spec's seeds, or of the measure's support when none.
std::vector<std::size_t> seed_points(const ProblemSpec& spec, const GridMeasure& m);

std::size_t ergodic_burn_in(double tau);

}  // namespace wkam
