#include <benchmark/benchmark.h>

#include "achedge/dual.hpp"
#include "achedge/simulate.hpp"
#include "achedge/variational.hpp"

using namespace achedge;

namespace {

ProblemSpec worked() {
  ProblemSpec p;
  p.kappa = 0.25;
  p.phi0 = 0.5;
  return p;
}

void BM_McParallel(benchmark::State& state) {
  const McConfig cfg{static_cast<std::size_t>(state.range(0)), 500, 0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(mc_certainty_equivalent(worked(), cfg, StrategySource::feedback()));
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_paths * cfg.n_steps);
}

void BM_McReference(benchmark::State& state) {
  const McConfig cfg{static_cast<std::size_t>(state.range(0)), 500, 0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        mc_certainty_equivalent_reference(worked(), cfg, StrategySource::feedback()));
  }
  state.SetItemsProcessed(state.iterations() * cfg.n_paths * cfg.n_steps);
}

void BM_GradientParallel(benchmark::State& state) {
  const McConfig cfg{2000, 500, 0};
  const auto dirs = smooth_directions(500, static_cast<std::size_t>(state.range(0)), 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gradient_check(worked(), StrategySource::feedback(), dirs, {0.05}, cfg));
  }
}

void BM_GradientReference(benchmark::State& state) {
  const McConfig cfg{2000, 500, 0};
  const auto dirs = smooth_directions(500, static_cast<std::size_t>(state.range(0)), 0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        gradient_check_reference(worked(), StrategySource::feedback(), dirs, {0.05}, cfg));
  }
}

void BM_DualKernel(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(dual_kernel(worked(), static_cast<std::size_t>(state.range(0))));
  }
}

void BM_DualValue(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(dual_value(worked()));
}

void BM_SolveDiscretized(benchmark::State& state) {
  const auto inst = i_instance(worked());
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_discretized(inst, static_cast<std::size_t>(state.range(0))));
  }
}

}  // namespace

BENCHMARK(BM_McParallel)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McReference)->Arg(2000)->Arg(20000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientParallel)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GradientReference)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DualKernel)->Arg(500)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DualValue)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SolveDiscretized)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
