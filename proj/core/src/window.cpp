#include "wkam/window.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "wkam/errors.hpp"
#include "wkam/lax_oleinik.hpp"

namespace wkam {

void ProblemSpec::validate() const {
  if (std::isfinite(tau) && std::isfinite(lambda) && !(tau * lambda < 1.0))
    throw InvalidSpecError("tau * lambda must be < 1, got " + std::to_string(tau * lambda));
  if (!(tau > 0.0 && tau < 1.0)) throw InvalidSpecError("tau must lie in (0, 1), got " + std::to_string(tau));
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidSpecError("lambda must lie in [0, 1], got " + std::to_string(lambda));
  const auto& t = tolerances;
  if (!(t.value_tol > 0.0) || !(t.ergodic_tol > 0.0) || !(t.fixed_point_tol > 0.0))
    throw InvalidSpecError("tolerances must be positive");
  if (!(t.damping > 0.0 && t.damping <= 1.0)) throw InvalidSpecError("damping theta must lie in (0, 1]");
  if (t.max_iters == 0 || t.max_outer == 0) throw InvalidSpecError("iteration limits must be positive");
  if (window_radius < 0) throw InvalidSpecError("window radius must be >= 0 (0 selects the default)");
  if (lagrangian.dim() != grid.dim()) throw InvalidSpecError("Lagrangian dimension does not match the grid");
  if (orbit.samples == 0) throw InvalidSpecError("orbit samples must be positive");
  for (const auto& s : seeds)
    for (double c : s)
      if (!std::isfinite(c)) throw InvalidSpecError("seed coordinates must be finite");
}

std::size_t ProblemSpec::burn_in() const {
  if (orbit.burn_in > 0) return orbit.burn_in;
  if (ergodic()) return static_cast<std::size_t>(std::ceil(50.0 / tau));
  return static_cast<std::size_t>(std::ceil(10.0 / (tau * lambda)));
}

double estimate_speed_bound(const ProblemSpec& spec, const GridMeasure& m) {
  const TorusGrid pilot(spec.grid.dim(), kPilotGridPoints);
  const VelocityWindow window(pilot, pilot.max_lift(), spec.tau);
  const ActionTable table(EffectiveLagrangian(spec.lagrangian, spec.coupling, m), window);

  Regime regime = Discounted{spec.lambda};
  GridFunction u(pilot);
  const ValueIterationOptions options{1e-9, spec.tolerances.max_iters};
  if (spec.ergodic()) {
    auto [v, report] = solve_ergodic(table, options);
    u = std::move(v);
    regime = Ergodic{report.lbar};
  } else {
    u = solve_discounted(table, spec.lambda, options).first;
  }

  double speed = 0.0;
  const CalibrationMap map(table, u, regime);
  for (std::size_t y = 0; y < pilot.size(); ++y) {
    const Point v = window.velocity(map.slot(y));
    for (int a = 0; a < pilot.dim(); ++a) speed = std::max(speed, std::abs(v[a]));
  }

  const double lip = u.lipschitz_constant();
  if (lip > 0.0) {
    const int nv = pilot.dim() == 1 ? 257 : 65;
    for (std::size_t x = 0; x < pilot.size(); ++x) {
      for (int a = 0; a < pilot.dim(); ++a) {
        for (double sign : {-1.0, 1.0}) {
          Point p{0.0, 0.0};
          p[a] = sign * lip;
          const Point v = legendre_maximizer(spec.lagrangian, pilot.point(x), p, window.max_speed(), nv);
          for (int b = 0; b < pilot.dim(); ++b) speed = std::max(speed, std::abs(v[b]));
        }
      }
    }
  }
  return speed;
}

int default_window_radius(const ProblemSpec& spec, const GridMeasure& m) {
  const double speed = estimate_speed_bound(spec, m);
  const double steps = 2.0 * speed * spec.tau / spec.grid.spacing();
  const int radius = static_cast<int>(std::ceil(steps - 1e-9));
  return std::clamp(radius, 1, spec.grid.max_lift());
}

}  // namespace wkam
