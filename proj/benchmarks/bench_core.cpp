#include <benchmark/benchmark.h>

#include "couette/diagnostics.hpp"

using namespace couette;

static void BM_AssembleJ(benchmark::State& state) {
  const ChebGrid g(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_j(g, 1.0));
}
BENCHMARK(BM_AssembleJ)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_HelmholtzSolve(benchmark::State& state) {
  const ChebGrid g(static_cast<int>(state.range(0)));
  const HelmholtzSolver solver(g, 1.0);
  const ModeField f = calibration_ensemble(g, 1, 1).front();
  for (auto _ : state) benchmark::DoNotOptimize(solver.solve(f));
}
BENCHMARK(BM_HelmholtzSolve)->Arg(64)->Arg(128)->Arg(256);

static void BM_NonlinearStep(benchmark::State& state) {
  const ChebGrid g(64);
  const int K = static_cast<int>(state.range(0));
  const Real nu = 1e-3;
  InitConfig init;
  init.amplitude = 0.01 * std::sqrt(nu);
  FlowState s = init_perturbation(g, 100.0, K, nu, init);
  NonlinearSolver solver(g, 100.0, K, nu, 0.01);
  for (auto _ : state) solver.step(s);
}
BENCHMARK(BM_NonlinearStep)->Arg(16)->Arg(32)->Arg(48)->Unit(benchmark::kMillisecond);

static void BM_GlobalEnergy(benchmark::State& state) {
  const ChebGrid g(64);
  const int K = static_cast<int>(state.range(0));
  const OperatorCache cache(g, 100.0, K);
  WeightSet w;
  InitConfig init;
  init.amplitude = 1e-3;
  const FlowState s = init_perturbation(g, 100.0, K, w.nu, init);
  for (auto _ : state) benchmark::DoNotOptimize(global_energy(g, s, w, cache));
}
BENCHMARK(BM_GlobalEnergy)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
