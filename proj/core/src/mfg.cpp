#include "wkam/mfg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "wkam/errors.hpp"
#include "wkam/parallel.hpp"
#include "wkam/transport.hpp"
#include "wkam/window.hpp"

namespace wkam {

namespace {

Regime regime_of(const ProblemSpec& spec, const SolveReport& report) {
  if (spec.ergodic()) return Ergodic{report.lbar};
  return Discounted{spec.lambda};
}

double value_tolerance(const ProblemSpec& spec) {
  return spec.ergodic() ? spec.tolerances.ergodic_tol : spec.tolerances.value_tol;
}

MfgSolution assemble(const ProblemSpec& spec, BestResponse br, GridMeasure m, double gap) {
  const Regime regime = regime_of(spec, br.value.report);
  const EffectiveLagrangian lm(spec.lagrangian, spec.coupling, m);
  MinimizingMeasureReport measure_report = verify_minimizing(br.mu, br.value.u, lm, regime);
  measure_report.burn_in = br.burn_in;
  measure_report.orbit_length = br.burn_in + br.max_samples;
  const HjbResidual hjb = hjb_residual(br.value.u, m, spec, br.value.window, regime);
  const ContinuityResidual continuity = continuity_residual(br.mu);

  MfgResiduals residuals;
  residuals.hjb = hjb.discrete;
  residuals.hjb_fd = hjb.finite_difference;
  residuals.holonomy = measure_report.holonomy_defect;
  residuals.continuity = continuity.residual;
  residuals.continuity_bound = continuity.bound;
  residuals.coupling_gap = gap;
  return MfgSolution{std::move(br.value.u), std::move(m),          std::move(br.mu), std::move(br.value.report),
                     std::move(measure_report), residuals, {}, 0, 0, 0.0, false, spec.ergodic()};
}

MfgSolution damped_loop(const ProblemSpec& spec, const GridMeasure& m_init) {
  spec.validate();
  if (m_init.grid() != spec.grid) throw ShapeError("initial measure grid does not match the problem grid");
  const bool independent = !spec.coupling.depends_on_measure();
  const double theta = independent ? 1.0 : spec.tolerances.damping;
  const double tol = spec.tolerances.fixed_point_tol;

  GridMeasure m = m_init;
  std::optional<ValueSolution> cached;
  std::optional<BestResponse> best;
  std::optional<GridMeasure> best_m;
  double best_gap = std::numeric_limits<double>::infinity();
  std::vector<double> history;
  std::size_t updates = 0;
  std::size_t iterations = 0;
  for (std::size_t k = 1; k <= spec.tolerances.max_outer; ++k) {
    iterations = k;
    BestResponse br = best_response(spec, m, independent ? cached : std::nullopt);
    if (independent && !cached) cached = br.value;
    const double gap = d1_distance(br.projected, m);
    history.push_back(gap);
    GridMeasure next = GridMeasure::mix(m, br.projected, theta);
    if (gap < best_gap) {
      best_gap = gap;
      best = std::move(br);
      best_m = m;
    }
    if (gap <= tol || k == spec.tolerances.max_outer) break;
    m = std::move(next);
    ++updates;
  }
  MfgSolution out = assemble(spec, std::move(*best), std::move(*best_m), best_gap);
  out.d1_history = std::move(history);
  out.outer_iterations = iterations;
  out.updates = updates;
  out.damping = theta;
  out.converged = best_gap <= tol;
  return out;
}

}  // namespace

BestResponse best_response(const ProblemSpec& spec, const GridMeasure& m, const std::optional<ValueSolution>& reuse) {
  ValueSolution value = reuse ? *reuse : (spec.ergodic() ? solve_ergodic(spec, m) : solve_discounted(spec, m));
  const Regime regime = regime_of(spec, value.report);
  const EffectiveLagrangian lm(spec.lagrangian, spec.coupling, m);
  const ActionTable table(lm, value.window);
  const CalibrationMap map(table, value.u, regime);

  const std::size_t burn_in =
      spec.ergodic() && spec.orbit.burn_in == 0 ? ergodic_burn_in(spec.tau) : spec.burn_in();
  const auto seeds = seed_points(spec, m);
  std::vector<double> weights;
  for (std::size_t s : seeds) weights.push_back(spec.seeds.empty() ? m[s] : 1.0);

  std::vector<std::optional<OrbitMeasure>> parts(seeds.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    tasks.emplace_back([&, i] { parts[i] = calibrated_measure(map, seeds[i], burn_in, spec.orbit.samples, value_tolerance(spec)); });
  run_tasks(tasks);

  std::vector<PhaseMeasure> measures;
  std::size_t longest_burn = 0;
  std::size_t longest_samples = 0;
  for (auto& p : parts) {
    longest_burn = std::max(longest_burn, p->burn_in);
    longest_samples = std::max(longest_samples, p->samples);
    measures.push_back(std::move(p->measure));
  }
  PhaseMeasure mu = PhaseMeasure::average(measures, weights);
  GridMeasure projected = pushforward(mu);
  return BestResponse{std::move(value), std::move(mu), std::move(projected), longest_burn, longest_samples};
}

MfgSolution solve_dmfg(const ProblemSpec& spec, const GridMeasure& m_init) {
  if (spec.ergodic()) throw InvalidSpecError("solve_dmfg needs lambda > 0; use solve_ergodic_mfg");
  return damped_loop(spec, m_init);
}

MfgSolution solve_ergodic_mfg(const ProblemSpec& spec, const GridMeasure& m_init) {
  ProblemSpec ergodic = spec;
  ergodic.lambda = 0.0;
  return damped_loop(ergodic, m_init);
}

HjbResidual hjb_residual(const GridFunction& u, const GridMeasure& m, const ProblemSpec& spec,
                         const VelocityWindow& window, const Regime& regime) {
  const EffectiveLagrangian lm(spec.lagrangian, spec.coupling, m);
  const ActionTable table(lm, window);
  const TorusGrid& grid = u.grid();
  const double tau = window.tau();

  double lambda = 0.0;
  double lbar = 0.0;
  GridFunction image(grid);
  if (const auto* d = std::get_if<Discounted>(&regime)) {
    lambda = d->lambda;
    image = apply_discounted_operator(u, table, lambda);
  } else {
    lbar = std::get<Ergodic>(regime).lbar;
    image = apply_ergodic_operator(u, table);
  }
  double discrete = 0.0;
  for (std::size_t y = 0; y < u.size(); ++y) discrete = std::max(discrete, std::abs(image[y] - u[y] - tau * lbar));
  discrete /= tau;

  // Godunov-type upwind gradient for a Hamiltonian convex in p.
  const double h = grid.spacing();
  const int nv = grid.dim() == 1 ? 257 : 65;
  double fd = 0.0;
  for (std::size_t y = 0; y < u.size(); ++y) {
    Point p{0.0, 0.0};
    double pmax = 0.0;
    for (int a = 0; a < grid.dim(); ++a) {
      Offset e{0, 0};
      e[a] = 1;
      const double back = (u[y] - u[grid.shift(y, {-e[0], -e[1]})]) / h;
      const double fwd = (u[grid.shift(y, e)] - u[y]) / h;
      const double left = std::max(back, 0.0);
      const double right = std::min(fwd, 0.0);
      p[a] = left >= -right ? left : right;
      pmax = std::max(pmax, std::abs(p[a]));
    }
    const Point x = grid.point(y);
    const double vmax = std::max(window.max_speed(), 2.0 * pmax + 1.0);
    const double hamiltonian = legendre_hamiltonian(spec.lagrangian, x, p, vmax, nv);
    fd = std::max(fd, std::abs(lambda * u[y] + hamiltonian - table.potential(y) + lbar));
  }
  return {discrete, fd};
}

HjbResidual hjb_residual(const GridFunction& u, const GridMeasure& m, const ProblemSpec& spec) {
  const int radius = spec.window_radius > 0 ? spec.window_radius : default_window_radius(spec, m);
  const VelocityWindow window(spec.grid, radius, spec.tau);
  if (spec.ergodic()) {
    const ActionTable table(EffectiveLagrangian(spec.lagrangian, spec.coupling, m), window);
    const GridFunction image = apply_ergodic_operator(u, table);
    double lbar = 0.0;
    for (std::size_t y = 0; y < u.size(); ++y) lbar += (image[y] - u[y]) / static_cast<double>(u.size());
    return hjb_residual(u, m, spec, window, Ergodic{lbar / spec.tau});
  }
  return hjb_residual(u, m, spec, window, Discounted{spec.lambda});
}

std::vector<SmoothTestFunction> smooth_fourier_family(int dim, int modes) {
  std::vector<SmoothTestFunction> out;
  for (int a = 0; a < dim; ++a) {
    for (int k = 1; k <= modes; ++k) {
      const double w = 2.0 * std::numbers::pi * k;
      out.push_back({[=](const Point& x) { return std::sin(w * x[a]); },
                     [=](const Point& x) {
                       Point g{0.0, 0.0};
                       g[a] = w * std::cos(w * x[a]);
                       return g;
                     },
                     w * w});
      out.push_back({[=](const Point& x) { return std::cos(w * x[a]); },
                     [=](const Point& x) {
                       Point g{0.0, 0.0};
                       g[a] = -w * std::sin(w * x[a]);
                       return g;
                     },
                     w * w});
    }
  }
  return out;
}

ContinuityResidual continuity_residual(const PhaseMeasure& mu, const std::vector<SmoothTestFunction>& test_functions) {
  const TorusGrid& grid = mu.grid();
  const auto& window = mu.window();
  const auto atoms = mu.atoms();
  const double tau = window.tau();
  double second_moment = 0.0;
  for (const auto& a : atoms) {
    const Point v = window.velocity(a.slot);
    second_moment += a.weight * (v[0] * v[0] + v[1] * v[1]);
  }
  ContinuityResidual out{0.0, 0.0};
  for (const auto& f : test_functions) {
    double pairing = 0.0;
    double shift = 0.0;
    for (const auto& a : atoms) {
      const Point x = grid.point(a.point);
      const Point v = window.velocity(a.slot);
      const Point g = f.gradient(x);
      pairing += a.weight * (g[0] * v[0] + g[1] * v[1]);
      shift += a.weight * (f.value(grid.point(grid.shift(a.point, window.offsets()[a.slot]))) - f.value(x));
    }
    out.residual = std::max(out.residual, std::abs(pairing));
    out.bound = std::max(out.bound, std::abs(shift) / tau + 0.5 * tau * f.hessian_bound * second_moment);
  }
  return out;
}

ContinuityResidual continuity_residual(const PhaseMeasure& mu) {
  return continuity_residual(mu, smooth_fourier_family(mu.grid().dim(), 3));
}

NonuniquenessResult demonstrate_nonuniqueness(const ProblemSpec& spec, const Point& seed_a, const Point& seed_b) {
  const std::size_t ia = spec.grid.nearest(seed_a);
  const std::size_t ib = spec.grid.nearest(seed_b);
  std::optional<MfgSolution> a;
  std::optional<MfgSolution> b;
  auto branch = [&spec](std::size_t seed) {
    ProblemSpec s = spec;
    s.seeds = {s.grid.point(seed)};
    return solve_dmfg(s, GridMeasure::dirac(s.grid, seed));
  };
  run_tasks({[&] { a = branch(ia); }, [&] { b = branch(ib); }});

  const GridMeasure m_a = GridMeasure::dirac(spec.grid, ia);
  double lowest = std::numeric_limits<double>::infinity();
  std::vector<double> f(spec.grid.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    f[i] = spec.coupling.eval(spec.grid.point(i), m_a);
    lowest = std::min(lowest, f[i]);
  }
  const auto ties = static_cast<std::size_t>(std::count(f.begin(), f.end(), lowest));

  const double separation = d1_distance(a->m, b->m);
  const double threshold = 0.25 * spec.grid.distance(ia, ib);
  const bool success = a->converged && b->converged && separation >= threshold;
  return NonuniquenessResult{std::move(*a), std::move(*b), separation, threshold, ties, success};
}

}  // namespace wkam
