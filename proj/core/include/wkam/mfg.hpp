#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "wkam/holonomic.hpp"
#include "wkam/lax_oleinik.hpp"
#include "wkam/measures.hpp"
#include "wkam/problem.hpp"

namespace wkam {

struct MfgResiduals {
  double hjb = 0.0;              // ||T u - u||_inf / tau
  double hjb_fd = 0.0;           // upwind finite-difference defect, diagnostic only
  double holonomy = 0.0;
  double continuity = 0.0;
  double continuity_bound = 0.0;
  double coupling_gap = 0.0;     // d1(m, pi#mu)
};

struct MfgSolution {
  GridFunction u;
  GridMeasure m;
  PhaseMeasure mu;
  SolveReport solve_report;
  MinimizingMeasureReport measure_report;
  MfgResiduals residuals;
  std::vector<double> d1_history;  // d1(pi#mu_k, m_k) per outer iteration
  std::size_t outer_iterations = 0;
  std::size_t updates = 0;  // number of measure updates performed
  double damping = 0.0;     // theta actually used
  bool converged = false;
  bool ergodic = false;
};

/// One inner solve: value function for L_m and the averaged calibrated orbit
/// measure. Seeds come from the spec or, when it has none, from the support
/// of m weighted by m.
struct BestResponse {
  ValueSolution value;
  PhaseMeasure mu;
  GridMeasure projected;
  std::size_t burn_in = 0;
  std::size_t max_samples = 0;
};

BestResponse best_response(const ProblemSpec& spec, const GridMeasure& m,
                           const std::optional<ValueSolution>& reuse = std::nullopt);

/// Damped iteration m <- (1 - theta) m + theta pi#mu(m). Stops once
/// d1(pi#mu(m), m) <= fixed_point_tol and returns that m with its u and mu.
/// For measure-independent couplings theta is 1 and the inner value
/// function is solved once. Never throws on outer non-convergence: the
/// iterate with the smallest gap is returned with converged == false.
MfgSolution solve_dmfg(const ProblemSpec& spec, const GridMeasure& m_init);

/// Same damped loop around the ergodic solver (lambda ignored).
MfgSolution solve_ergodic_mfg(const ProblemSpec& spec, const GridMeasure& m_init);

struct HjbResidual {
  double discrete;
  double finite_difference;
};

/// ||T u - u||_inf / tau (with the lbar shift when ergodic) plus the upwind
/// finite-difference defect |lambda u + H(x, D_h u) - F(x, m) (+ lbar)|.
HjbResidual hjb_residual(const GridFunction& u, const GridMeasure& m, const ProblemSpec& spec,
                         const VelocityWindow& window, const Regime& regime);
HjbResidual hjb_residual(const GridFunction& u, const GridMeasure& m, const ProblemSpec& spec);

struct SmoothTestFunction {
  std::function<double(const Point&)> value;
  std::function<Point(const Point&)> gradient;
  double hessian_bound;
};

/// sin and cos of 2 pi k x_a, k = 1..modes, per axis.
std::vector<SmoothTestFunction> smooth_fourier_family(int dim, int modes = 3);

struct ContinuityResidual {
  double residual;  // max_f |sum mu <Df(x), v>|
  double bound;     // max_f of |sum mu (f(x + tau v) - f(x))| / tau + tau/2 |D^2 f| E|v|^2
};

ContinuityResidual continuity_residual(const PhaseMeasure& mu, const std::vector<SmoothTestFunction>& test_functions);
ContinuityResidual continuity_residual(const PhaseMeasure& mu);

struct NonuniquenessResult {
  MfgSolution a;
  MfgSolution b;
  double separation;
  double threshold;  // 0.25 * geodesic distance between the seeds
  std::size_t tied_minimizers;  // grid points attaining min F(., m_init of branch a)
  bool success;
};

/// Runs solve_dmfg from point masses at the two seeds (orbits seeded there)
/// concurrently. Succeeds iff both converge and d1(m_a, m_b) >= threshold.
NonuniquenessResult demonstrate_nonuniqueness(const ProblemSpec& spec, const Point& seed_a, const Point& seed_b);

}  // namespace wkam
