#pragma once

#include "wkam/measures.hpp"
#include "wkam/problem.hpp"

namespace wkam {

inline constexpr int kPilotGridPoints = 16;
inline constexpr int kMaxWindowEscalations = 3;

/// Speed bound D_est from a full-window pilot solve on a 16-point grid: the
/// larger of the fastest calibrated step and the Legendre speed at the
/// pilot's discrete Lipschitz momentum.
double estimate_speed_bound(const ProblemSpec& spec, const GridMeasure& m);

/// W = ceil(2 D_est tau / h), clamped to [1, N/2].
int default_window_radius(const ProblemSpec& spec, const GridMeasure& m);

}  // namespace wkam
