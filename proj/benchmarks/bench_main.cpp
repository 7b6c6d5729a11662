#include <benchmark/benchmark.h>

#include "wkam/lax_oleinik.hpp"
#include "wkam/transport.hpp"
#include "wkam/window.hpp"

using namespace wkam;

namespace {

ProblemSpec appendix_b(int n, double tau, double lambda) {
  auto [l, c] = appendix_b_model(1, 0.0, twowell_potential());
  return ProblemSpec{l, c, TorusGrid(1, n), tau, lambda};
}

void BM_OperatorSweep(benchmark::State& state) {
  const auto spec = appendix_b(static_cast<int>(state.range(0)), 0.1, 0.5);
  const auto m = GridMeasure::uniform(spec.grid);
  const ActionTable table(EffectiveLagrangian(spec.lagrangian, spec.coupling, m),
                          VelocityWindow(spec.grid, static_cast<int>(state.range(1)), spec.tau));
  GridFunction u = GridFunction::sample(spec.grid, twowell_potential().eval);
  for (auto _ : state) benchmark::DoNotOptimize(apply_discounted_operator(u, table, spec.lambda));
  state.SetItemsProcessed(state.iterations() * state.range(0) * (2 * state.range(1) + 1));
}
BENCHMARK(BM_OperatorSweep)->Args({128, 8})->Args({512, 16})->Args({512, 64});

void BM_SolveDiscounted(benchmark::State& state) {
  const auto spec = appendix_b(static_cast<int>(state.range(0)), 0.1, 0.5);
  const auto m = GridMeasure::uniform(spec.grid);
  for (auto _ : state) benchmark::DoNotOptimize(solve_discounted(spec, m));
}
BENCHMARK(BM_SolveDiscounted)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_CircleD1(benchmark::State& state) {
  const TorusGrid g(1, static_cast<int>(state.range(0)));
  const auto a = GridMeasure::uniform(g);
  const auto b = GridMeasure::dirac(g, 0);
  for (auto _ : state) benchmark::DoNotOptimize(d1_distance(a, b));
}
BENCHMARK(BM_CircleD1)->Arg(128)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
