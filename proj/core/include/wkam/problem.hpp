#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wkam/grid.hpp"
#include "wkam/models.hpp"

namespace wkam {

struct SolverTolerances {
  double value_tol = 1e-10;    // sup-norm change per sweep, discounted
  double ergodic_tol = 1e-9;   // span of the per-sweep shift, ergodic
  std::size_t max_iters = 2'000'000;
  double fixed_point_tol = 1e-5;  // d1 between m and the projected measure
  double damping = 0.5;
  std::size_t max_outer = 200;
};

struct OrbitSettings {
  std::size_t burn_in = 0;     // 0 selects 10/(tau lambda), or 50/tau when ergodic
  std::size_t samples = 2000;  // Cesaro samples after burn-in
};

/// Full input of one solve. lambda == 0 selects the ergodic problem.
struct ProblemSpec {
  LagrangianModel lagrangian;
  CouplingModel coupling;
  TorusGrid grid;
  double tau;
  double lambda;
  int window_radius = 0;  // 0 selects the pilot-solve default
  SolverTolerances tolerances{};
  OrbitSettings orbit{};
  std::vector<Point> seeds{};  // empty: orbits start from the support of m
  std::uint64_t rng_seed = 0;

  /// Throws InvalidSpecError naming the violated constraint.
  void validate() const;

  bool ergodic() const noexcept { return lambda == 0.0; }
  std::size_t burn_in() const;
};

}  // namespace wkam
