#include "wkam/limits.hpp"

#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <limits>

#include "wkam/errors.hpp"
#include "wkam/holonomic.hpp"
#include "wkam/mfg.hpp"
#include "wkam/parallel.hpp"
#include "wkam/transport.hpp"

namespace wkam {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void require_decreasing(const std::vector<double>& params, const char* name) {
  if (params.empty()) throw InvalidSpecError(std::string("sweep needs at least one ") + name);
  for (std::size_t i = 1; i < params.size(); ++i)
    if (!(params[i] < params[i - 1])) throw InvalidSpecError(std::string(name) + " must be strictly decreasing");
}

SweepRecord make_record(double param, GridFunction u, const MfgSolution& sol, double lbar_or_c) {
  SweepRecord r{.param = param, .u = std::move(u), .m = sol.m, .error = {}};
  r.sup_norm = r.u.sup_norm();
  const auto refs = reference_points(r.u.grid());
  for (std::size_t i = 0; i < refs.size(); ++i) r.u_ref[i] = r.u[refs[i]];
  r.lbar_or_c = lbar_or_c;
  r.hjb_res = sol.residuals.hjb;
  r.holo_res = sol.residuals.holonomy;
  r.coupling_gap = sol.residuals.coupling_gap;
  r.window_radius = sol.solve_report.window_radius;
  r.converged = sol.converged;
  return r;
}

SweepRecord failed_record(double param, const TorusGrid& grid, std::string error) {
  SweepRecord r{.param = param, .u = GridFunction(grid, kNaN), .m = GridMeasure::uniform(grid), .error = {}};
  r.sup_norm = kNaN;
  r.u_ref.fill(kNaN);
  r.lbar_or_c = r.hjb_res = r.holo_res = r.coupling_gap = kNaN;
  r.error = std::move(error);
  return r;
}

SweepTable run_sweep(std::string kind, const ProblemSpec& spec, const std::vector<double>& params,
                     const SweepOptions& options, const std::function<SweepRecord(double, const GridMeasure&)>& row) {
  const GridMeasure m_init = options.m_init ? *options.m_init : GridMeasure::uniform(spec.grid);
  std::vector<std::optional<SweepRecord>> slots(params.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < params.size(); ++i) {
    tasks.emplace_back([&, i] {
      const auto start = std::chrono::steady_clock::now();
      try {
        slots[i] = row(params[i], m_init);
      } catch (const std::exception& e) {
        slots[i] = failed_record(params[i], spec.grid, e.what());
      }
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      slots[i]->seconds = options.record_timing ? elapsed.count() : kNaN;
    });
  }
  run_tasks(tasks);

  SweepTable table{std::move(kind), {}, std::nullopt};
  for (auto& s : slots) table.rows.push_back(std::move(*s));
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    auto& r = table.rows[i];
    if (i == 0 || !r.error.empty() || !table.rows[i - 1].error.empty()) {
      r.sup_cauchy = r.d1_cauchy = kNaN;
      continue;
    }
    r.sup_cauchy = sup_distance(r.u, table.rows[i - 1].u);
    r.d1_cauchy = d1_distance(r.m, table.rows[i - 1].m);
  }
  return table;
}

ErgodicComparison compare_with_ergodic(const ProblemSpec& spec, const SweepOptions& options, const SweepRecord& last) {
  ErgodicComparison out;
  try {
    const GridMeasure m_init = options.m_init ? *options.m_init : GridMeasure::uniform(spec.grid);
    ProblemSpec s = spec;
    s.lambda = 0.0;
    if (last.window_radius > 0) s.window_radius = last.window_radius;
    const MfgSolution sol = solve_ergodic_mfg(s, m_init);
    out.gauge_distance = gauge_distance(last.u, sol.u);
    out.d1 = d1_distance(last.m, sol.m);
    out.lbar = sol.solve_report.lbar;
    out.converged = sol.converged;
  } catch (const std::exception& e) {
    out.gauge_distance = out.d1 = out.lbar = kNaN;
    out.error = e.what();
  }
  return out;
}

}  // namespace

std::array<std::size_t, 4> reference_points(const TorusGrid& grid) {
  std::array<std::size_t, 4> out{};
  for (int i = 0; i < 4; ++i) {
    const double t = 0.25 * i;
    out[i] = grid.nearest(grid.dim() == 1 ? Point{t, 0.0} : Point{t, t});
  }
  return out;
}

SweepTable sweep_lambda_discrete(const ProblemSpec& spec, const std::vector<double>& lambdas,
                                 const SweepOptions& options) {
  require_decreasing(lambdas, "lambdas");
  for (double l : lambdas)
    if (!(l > 0.0)) throw InvalidSpecError("sweep lambdas must be positive");
  SweepTable table = run_sweep("lambda_discrete", spec, lambdas, options, [&](double lambda, const GridMeasure& m0) {
    ProblemSpec s = spec;
    s.lambda = lambda;
    const MfgSolution sol = solve_dmfg(s, m0);
    ProblemSpec e = s;
    e.lambda = 0.0;
    e.window_radius = sol.solve_report.window_radius;
    const double lbar = estimate_lbar(e, sol.m, LbarMethod::ergodic);
    GridFunction shifted = sol.u;
    shifted += -lbar / lambda;
    return make_record(lambda, std::move(shifted), sol, lbar);
  });
  if (options.compare_ergodic && table.rows.back().error.empty())
    table.ergodic = compare_with_ergodic(spec, options, table.rows.back());
  return table;
}

SweepTable sweep_lambda_continuum(const ProblemSpec& spec, const std::vector<double>& lambdas,
                                  const SweepOptions& options) {
  require_decreasing(lambdas, "lambdas");
  for (double l : lambdas)
    if (!(l > 0.0)) throw InvalidSpecError("sweep lambdas must be positive");
  return run_sweep("lambda_continuum", spec, lambdas, options, [&](double lambda, const GridMeasure& m0) {
    ProblemSpec s = spec;
    s.lambda = lambda;
    const MfgSolution sol = solve_dmfg(s, m0);
    ProblemSpec e = s;
    e.lambda = 0.0;
    e.window_radius = 0;
    const auto rows = estimate_critical_value(e, sol.m, {spec.tau, 0.5 * spec.tau});
    const double c = richardson_critical_value(rows[0].lbar, rows[1].lbar);
    GridFunction shifted = sol.u;
    shifted += c / lambda;
    return make_record(lambda, std::move(shifted), sol, c);
  });
}

SweepTable sweep_tau(const ProblemSpec& spec, const std::vector<double>& taus, const SweepOptions& options) {
  require_decreasing(taus, "taus");
  if (spec.ergodic()) throw InvalidSpecError("sweep_tau needs lambda > 0");
  return run_sweep("tau", spec, taus, options, [&](double tau, const GridMeasure& m0) {
    ProblemSpec s = spec;
    s.tau = tau;
    s.window_radius = 0;
    const MfgSolution sol = solve_dmfg(s, m0);
    ProblemSpec e = s;
    e.lambda = 0.0;
    e.window_radius = sol.solve_report.window_radius;
    const double lbar = estimate_lbar(e, sol.m, LbarMethod::ergodic);
    return make_record(tau, sol.u, sol, lbar);
  });
}

}  // namespace wkam
