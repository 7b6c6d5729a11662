#include "wkam/holonomic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include "wkam/errors.hpp"
#include "wkam/parallel.hpp"

namespace wkam {

PhaseMeasure empirical_measure(const CalibratedOrbit& orbit, std::size_t burn_in) {
  const std::size_t n = orbit.steps();
  if (n <= burn_in + 1)
    throw LengthError("orbit of " + std::to_string(n) + " steps is too short for burn-in " + std::to_string(burn_in));
  std::vector<double> w(orbit.window.grid().size() * orbit.window.slot_count(), 0.0);
  const std::size_t k_slots = orbit.window.slot_count();
  for (std::size_t k = burn_in + 1; k <= n; ++k) w[orbit.points[k] * k_slots + orbit.slots[k - 1]] += 1.0;
  const double count = static_cast<double>(n - burn_in);
  for (double& x : w) x /= count;
  return PhaseMeasure(orbit.window, std::move(w));
}

MinimizingMeasureReport verify_minimizing(const PhaseMeasure& mu, const GridFunction& u, const EffectiveLagrangian& lm,
                                          const Regime& regime, const MinimizingTolerances& tolerances) {
  if (mu.grid() != u.grid()) throw ShapeError("verify_minimizing: measure and value function use different grids");
  const TorusGrid& grid = mu.grid();
  const double lambda = std::holds_alternative<Discounted>(regime) ? std::get<Discounted>(regime).lambda : 0.0;
  double value = 0.0;
  for (const auto& a : mu.atoms()) {
    const double l = lm.eval(grid.point(a.point), mu.window().velocity(a.slot));
    value += a.weight * (l - lambda * u[a.point]);
  }
  if (const auto* e = std::get_if<Ergodic>(&regime)) value -= e->lbar;

  MinimizingMeasureReport report{mu, holonomy_residual(mu), value};
  report.tol_value = tolerances.value.value_or(1e-6 * (1.0 + u.sup_norm()));
  report.tol_holonomy = tolerances.holonomy;
  report.minimizing = std::abs(report.value_defect) <= report.tol_value && report.holonomy_defect <= report.tol_holonomy;
  return report;
}

OrbitMeasure calibrated_measure(const CalibrationMap& map, std::size_t seed, std::size_t burn_in, std::size_t samples,
                                double tol) {
  // The predecessor map is deterministic on a finite set, so the orbit is
  // periodic after at most |grid| further steps. Extend burn-in to the cycle
  // entry and take whole periods.
  const std::size_t n_points = map.window().grid().size();
  std::size_t z = seed;
  for (std::size_t k = 0; k < burn_in; ++k) z = map.predecessor(z);
  std::vector<std::size_t> first_visit(n_points, n_points + 1);
  std::size_t step = 0;
  while (first_visit[z] == n_points + 1) {
    first_visit[z] = step++;
    z = map.predecessor(z);
  }
  const std::size_t extra = first_visit[z];
  const std::size_t period = step - first_visit[z];
  burn_in += extra;
  samples = period * ((samples + period - 1) / period);
  const CalibratedOrbit orbit = trace_orbit(map, seed, burn_in + samples, tol);
  return {empirical_measure(orbit, burn_in), burn_in, samples, period};
}

bool AubryApproximation::contains(std::size_t point, std::size_t slot) const {
  return std::any_of(atoms.begin(), atoms.end(), [&](const AubryAtom& a) { return a.point == point && a.slot == slot; });
}

AubryApproximation approximate_aubry(const CalibrationMap& map, const std::vector<std::size_t>& seeds,
                                     std::size_t n_steps, std::size_t burn_in, double tol) {
  if (seeds.empty()) throw LengthError("approximate_aubry needs at least one seed");
  if (n_steps <= burn_in + 1) throw LengthError("approximate_aubry: n_steps must exceed burn_in + 1");
  std::vector<CalibratedOrbit> orbits(seeds.size(), CalibratedOrbit{map.window(), {}, {}, {}});
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    tasks.emplace_back([&, i] { orbits[i] = trace_orbit(map, seeds[i], n_steps, tol); });
  run_tasks(tasks);

  std::map<std::pair<std::size_t, std::size_t>, double> counts;
  double total = 0.0;
  for (const auto& orbit : orbits) {
    for (std::size_t k = burn_in + 1; k <= orbit.steps(); ++k) {
      counts[{orbit.points[k], orbit.slots[k - 1]}] += 1.0;
      total += 1.0;
    }
  }
  AubryApproximation out{map.window(), {}};
  for (const auto& [key, c] : counts) out.atoms.push_back({key.first, key.second, c / total});
  return out;
}

AubryApproximation approximate_aubry(const ActionTable& table, const GridFunction& u, const Regime& regime,
                                     const std::vector<std::size_t>& seeds, std::size_t n_steps, std::size_t burn_in,
                                     double tol) {
  return approximate_aubry(CalibrationMap(table, u, regime), seeds, n_steps, burn_in, tol);
}

std::size_t ergodic_burn_in(double tau) { return static_cast<std::size_t>(std::ceil(50.0 / tau)); }

std::vector<std::size_t> seed_points(const ProblemSpec& spec, const GridMeasure& m) {
  std::vector<std::size_t> out;
  if (!spec.seeds.empty()) {
    for (const auto& s : spec.seeds) out.push_back(spec.grid.nearest(s));
    return out;
  }
  return m.support();
}

double estimate_lbar(const ProblemSpec& spec, const GridMeasure& m, LbarMethod method) {
  ProblemSpec ergodic = spec;
  ergodic.lambda = 0.0;
  const ValueSolution sol = solve_ergodic(ergodic, m);
  if (method == LbarMethod::ergodic) return sol.report.lbar;

  const EffectiveLagrangian lm(spec.lagrangian, spec.coupling, m);
  const ActionTable table(lm, sol.window);
  const CalibrationMap map(table, sol.u, Ergodic{sol.report.lbar});
  const std::size_t burn_in = spec.orbit.burn_in > 0 ? spec.orbit.burn_in : ergodic_burn_in(spec.tau);
  const auto seeds = spec.seeds.empty() ? std::vector<std::size_t>{0} : seed_points(spec, m);
  std::vector<PhaseMeasure> parts;
  for (std::size_t s : seeds)
    parts.push_back(calibrated_measure(map, s, burn_in, spec.orbit.samples, spec.tolerances.ergodic_tol).measure);
  const PhaseMeasure mu = PhaseMeasure::average(parts, std::vector<double>(parts.size(), 1.0));
  double mean = 0.0;
  for (const auto& a : mu.atoms()) mean += a.weight * table.lagrangian(a.point, a.slot);
  return mean;
}

std::vector<CriticalValueRow> estimate_critical_value(const ProblemSpec& spec, const GridMeasure& m,
                                                      const std::vector<double>& taus) {
  for (std::size_t i = 1; i < taus.size(); ++i)
    if (!(taus[i] < taus[i - 1])) throw InvalidSpecError("tau sequence must be strictly decreasing");
  std::vector<CriticalValueRow> rows(taus.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < taus.size(); ++i) {
    tasks.emplace_back([&, i] {
      ProblemSpec s = spec;
      s.tau = taus[i];
      s.lambda = 0.0;
      s.window_radius = 0;
      const ValueSolution sol = solve_ergodic(s, m);
      rows[i] = {taus[i], sol.report.lbar, sol.report.window_radius};
    });
  }
  run_tasks(tasks);
  return rows;
}

double richardson_critical_value(double lbar_tau, double lbar_half_tau) { return -(2.0 * lbar_half_tau - lbar_tau); }

}  // namespace wkam
