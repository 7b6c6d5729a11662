#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "wkam/errors.hpp"
#include "wkam/mfg.hpp"
#include "wkam/transport.hpp"

using namespace wkam;

namespace {

ProblemSpec appendix_b(int n, double tau, double lambda, double f, Potential g) {
  auto [l, c] = appendix_b_model(1, f, std::move(g));
  return ProblemSpec{l, c, TorusGrid(1, n), tau, lambda};
}

void check_minimizing(const MfgSolution& s) {
  CHECK(s.converged);
  CHECK(s.residuals.holonomy <= 1e-4);
  CHECK(s.measure_report.value_defect >= -1e-6);
  CHECK(s.measure_report.value_defect <= 1e-4);
  CHECK(s.residuals.coupling_gap <= 1e-5);
}

}  // namespace

TEST_SUITE("mfg_solver") {

TEST_CASE("m-independent coupling converges after one update") {
  const auto spec = appendix_b(128, 0.1, 0.5, 0.0, sin2pi_potential());
  for (const auto& m0 : {GridMeasure::uniform(spec.grid), GridMeasure::dirac(spec.grid, 40)}) {
    const auto s = solve_dmfg(spec, m0);
    check_minimizing(s);
    CHECK(s.updates <= 1);
    CHECK(s.damping == 1.0);
    CHECK(d1_distance(s.m, GridMeasure::dirac(spec.grid, 0)) <= 2 * spec.grid.spacing());
    CHECK(s.residuals.hjb <= spec.tolerances.value_tol / spec.tau);
  }
}

TEST_CASE("flat landscape keeps a consistent m") {
  auto spec = appendix_b(32, 0.1, 0.5, 0.3, constant_potential(0.0));
  spec.seeds = {{0.25, 0.0}, {0.5, 0.0}};
  std::vector<double> w(32, 0.0);
  w[8] = w[16] = 0.5;
  const GridMeasure m0(spec.grid, w);
  const auto s = solve_dmfg(spec, m0);
  CHECK(s.residuals.coupling_gap <= spec.tolerances.fixed_point_tol);
  CHECK(d1_distance(s.m, m0) == 0.0);
  CHECK(s.outer_iterations == 1);
}

TEST_CASE("convolution coupling converges to a concentrated m") {
  const ProblemSpec spec{quadratic_lagrangian(1), convolution_coupling(sin2pi_potential(), 0.05), TorusGrid(1, 64), 0.1,
                         0.5};
  const auto s = solve_dmfg(spec, GridMeasure::uniform(spec.grid));
  check_minimizing(s);
  CHECK(s.residuals.coupling_gap <= 1e-4);
  CHECK(d1_distance(s.m, GridMeasure::dirac(spec.grid, 0)) <= 2 * spec.grid.spacing());
  CHECK(s.damping == doctest::Approx(0.5));

  // Each inner solve agrees with a full-window brute force on N = 16.
  const ProblemSpec small{quadratic_lagrangian(1), convolution_coupling(sin2pi_potential(), 0.05), TorusGrid(1, 16), 0.1,
                          0.5};
  const auto ss = solve_dmfg(small, GridMeasure::uniform(small.grid));
  const auto ref = oracle::double_loop_fixed_point(
      small.grid, small.lagrangian, [&](const Point& x) { return small.coupling.eval(x, ss.m); }, 0.1, 0.5, 1e-12);
  for (std::size_t i = 0; i < ref.size(); ++i) CHECK(ss.u[i] == doctest::Approx(ref[i]).epsilon(1e-8));
}

TEST_CASE("ergodic MFG solve") {
  const auto spec = appendix_b(64, 0.1, 0.5, 0.0, sin2pi_potential());
  const auto s = solve_ergodic_mfg(spec, GridMeasure::uniform(spec.grid));
  CHECK(s.ergodic);
  check_minimizing(s);
  CHECK(std::abs(s.solve_report.lbar) <= 1e-9);
  CHECK_THROWS_AS(solve_dmfg(appendix_b(64, 0.1, 0.0, 0.0, sin2pi_potential()), GridMeasure::uniform(spec.grid)),
                  InvalidSpecError);
}

TEST_CASE("hjb residual examples") {
  const auto spec = appendix_b(64, 0.1, 0.5, 0.0, sin2pi_potential());
  const auto m = GridMeasure::uniform(spec.grid);
  const auto sol = solve_discounted(spec, m);
  const auto converged = hjb_residual(sol.u, m, spec, sol.window, Discounted{0.5});
  CHECK(converged.discrete <= spec.tolerances.value_tol / spec.tau);
  CHECK(std::isfinite(converged.finite_difference));

  GridFunction bumped = sol.u;
  bumped[10] += spec.grid.spacing();
  const auto perturbed = hjb_residual(bumped, m, spec, sol.window, Discounted{0.5});
  const auto image = apply_discounted_operator(bumped, ActionTable(EffectiveLagrangian(spec.lagrangian, spec.coupling, m), sol.window), 0.5);
  CHECK(perturbed.discrete > 0.0);
  CHECK(perturbed.discrete == doctest::Approx(sup_distance(image, bumped) / spec.tau));

  const auto flat = appendix_b(32, 0.1, 0.5, 0.4, constant_potential(0.0));
  const auto fm = GridMeasure::uniform(flat.grid);
  const auto r = hjb_residual(GridFunction(flat.grid, 0.4 / 0.5), fm, flat);
  CHECK(r.discrete == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.finite_difference == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("continuity residual examples") {
  const TorusGrid g(1, 32);
  const VelocityWindow w(g, 3, 0.1);
  const auto still = PhaseMeasure::from_atoms(w, {{5, w.zero_slot(), 1.0}});
  CHECK(continuity_residual(still).residual == 0.0);
  const auto sym = PhaseMeasure::from_atoms(w, {{7, *w.slot_of({2, 0}), 0.5}, {7, *w.slot_of({-2, 0}), 0.5}});
  CHECK(continuity_residual(sym).residual <= 1e-12);

  const auto spec = appendix_b(128, 0.05, 0.5, 0.0, twowell_potential());
  const auto s = solve_dmfg(spec, GridMeasure::uniform(spec.grid));
  CHECK(s.residuals.continuity <= 1e-3);
  CHECK(s.residuals.continuity <= s.residuals.continuity_bound + 1e-12);
}

TEST_CASE("continuity bound dominates the pairing for holonomic measures") {
  std::mt19937_64 rng(31);
  const TorusGrid g(1, 24);
  const VelocityWindow w(g, 2, 0.1);
  for (int i = 0; i < 40; ++i) {
    const auto mu = oracle::random_cycle_measure(w, rng);
    const auto r = continuity_residual(mu);
    CHECK(r.residual <= r.bound + 1e-12);
  }
}

TEST_CASE("non-uniqueness demonstration") {
  {
    const auto spec = appendix_b(128, 0.1, 0.5, 0.0, twowell_potential());
    const auto r = demonstrate_nonuniqueness(spec, {0.0, 0.0}, {0.5, 0.0});
    CHECK(r.success);
    CHECK(r.separation == doctest::Approx(0.5).epsilon(2 * spec.grid.spacing()));
    CHECK(std::abs(r.a.u[0]) <= 0.02);
    CHECK(std::abs(r.b.u[64]) <= 0.02);
    CHECK(r.tied_minimizers == 2);
    check_minimizing(r.a);
    check_minimizing(r.b);
  }
  {
    const auto spec = appendix_b(128, 0.1, 0.5, 0.0, sin2pi_potential());
    const auto r = demonstrate_nonuniqueness(spec, {0.1, 0.0}, {0.9, 0.0});
    CHECK(r.separation <= 2 * spec.grid.spacing());
    CHECK_FALSE(r.success);
  }
  {
    const auto spec = appendix_b(64, 0.1, 0.5, 0.0, constant_potential(0.0));
    const auto r = demonstrate_nonuniqueness(spec, {0.125, 0.0}, {0.5, 0.0});
    CHECK(r.separation == doctest::Approx(0.375));
  }
}

TEST_CASE("damped iteration commutes with a cyclic relabeling") {
  const int n = 48;
  const int k = 11;
  const auto base = ProblemSpec{quadratic_lagrangian(1), convolution_coupling(twowell_potential(), 0.05), TorusGrid(1, n),
                                0.1, 0.5};
  std::vector<double> w(n);
  for (int i = 0; i < n; ++i) w[i] = 1.0 + 0.5 * std::sin(0.3 * i);
  const auto m0 = GridMeasure::normalized(base.grid, w);
  const auto a = solve_dmfg(base, m0);

  // Same problem written in coordinates x' = x - k h.
  const double s = static_cast<double>(k) / n;
  const auto g = twowell_potential();
  const Potential moved{"moved", [g, s](const Point& x) { return g.eval({x[0] + s, 0.0}); }, g.sup_abs};
  ProblemSpec shifted_spec = base;
  shifted_spec.coupling = convolution_coupling(moved, 0.05);
  std::vector<double> ws(n);
  for (int i = 0; i < n; ++i) ws[i] = m0[(i + k) % n];
  const auto b = solve_dmfg(shifted_spec, GridMeasure(base.grid, ws));
  REQUIRE(a.converged);
  REQUIRE(b.converged);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) worst = std::max(worst, std::abs(b.m[i] - a.m[(i + k) % n]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("outer non-convergence returns the best iterate") {
  auto spec = ProblemSpec{quadratic_lagrangian(1), convolution_coupling(sin2pi_potential(), 0.05), TorusGrid(1, 32), 0.1,
                          0.5};
  spec.tolerances.max_outer = 2;
  spec.tolerances.fixed_point_tol = 1e-14;
  const auto s = solve_dmfg(spec, GridMeasure::uniform(spec.grid));
  CHECK(s.d1_history.size() == 2);
  if (!s.converged) CHECK(s.residuals.coupling_gap == doctest::Approx(*std::min_element(s.d1_history.begin(), s.d1_history.end())));
}

}
