#include <benchmark/benchmark.h>

#include "cpsurf/frame.hpp"
#include "cpsurf/grid.hpp"
#include "cpsurf/immersion.hpp"
#include "cpsurf/parallel.hpp"

using namespace cpsurf;

namespace {

const SolutionSpec& cp1() {
  static const SolutionSpec s = make_builtin("cp1_example");
  return s;
}

Execution mode(const benchmark::State& state) { return state.range(1) ? Execution::Parallel : Execution::Serial; }

Grid grid(int n) { return {0.2, 3.0, -3.0, -0.2, n, n}; }

void BM_check_sweep(benchmark::State& state) {
  const Grid g = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(check_sweep(cp1(), g, mode(state)));
  state.SetItemsProcessed(state.iterations() * g.size());
}

void BM_geometry_sweep(benchmark::State& state) {
  const Grid g = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(geometry_sweep(cp1(), g, mode(state)));
  state.SetItemsProcessed(state.iterations() * g.size());
}

void BM_integrate_immersion(benchmark::State& state) {
  const Grid g = grid(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(integrate_immersion(cp1(), {0.2, -3.0}, g, {}, Staircase::LeftThenRight, mode(state)));
  }
  state.SetItemsProcessed(state.iterations() * g.size());
}

void BM_willmore(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(willmore(cp1(), 0.0, 1.0, -1.0, -0.2, n, n, mode(state)));
}

}  // namespace

BENCHMARK(BM_check_sweep)->ArgsProduct({{32, 64}, {0, 1}})->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_geometry_sweep)->ArgsProduct({{32, 64}, {0, 1}})->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_integrate_immersion)->ArgsProduct({{32, 64}, {0, 1}})->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_willmore)->ArgsProduct({{32, 64}, {0, 1}})->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::AddCustomContext("omp_max_threads", std::to_string(max_threads()));
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
