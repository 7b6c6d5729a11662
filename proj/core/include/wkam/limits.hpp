#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "wkam/grid.hpp"
#include "wkam/measures.hpp"
#include "wkam/problem.hpp"

namespace wkam {

struct SweepRecord {
  double param = 0.0;
  GridFunction u;  // the recorded (possibly shifted) value function
  GridMeasure m;
  double sup_norm = 0.0;
  std::array<double, 4> u_ref{};
  double sup_cauchy = 0.0;  // NaN on the first row
  double d1_cauchy = 0.0;
  double lbar_or_c = 0.0;
  double hjb_res = 0.0;
  double holo_res = 0.0;
  double coupling_gap = 0.0;
  double seconds = 0.0;  // NaN unless timing is recorded
  int window_radius = 0;
  bool converged = false;
  std::string error;  // non-empty when the row failed
};

/// Final row compared with the direct ergodic MFG solve.
struct ErgodicComparison {
  double gauge_distance = 0.0;
  double d1 = 0.0;
  double lbar = 0.0;
  bool converged = false;
  std::string error;
};

struct SweepTable {
  std::string kind;  // "lambda_discrete", "lambda_continuum" or "tau"
  std::vector<SweepRecord> rows;  // decreasing parameter
  std::optional<ErgodicComparison> ergodic;
};

struct SweepOptions {
  std::optional<GridMeasure> m_init;  // uniform when empty
  bool record_timing = false;
  bool compare_ergodic = true;
};

/// Rows u - lbar(tau, m^lambda) / lambda for each lambda.
SweepTable sweep_lambda_discrete(const ProblemSpec& spec, const std::vector<double>& lambdas,
                                 const SweepOptions& options = {});

/// Rows u + c / lambda with c the Richardson estimate from tau and tau / 2.
SweepTable sweep_lambda_continuum(const ProblemSpec& spec, const std::vector<double>& lambdas,
                                  const SweepOptions& options = {});

/// Rows u^tau at fixed lambda; each tau gets its default window.
SweepTable sweep_tau(const ProblemSpec& spec, const std::vector<double>& taus, const SweepOptions& options = {});

/// Grid images of 0, 1/4, 1/2, 3/4 (on the diagonal in 2D).
std::array<std::size_t, 4> reference_points(const TorusGrid& grid);

}  // namespace wkam
