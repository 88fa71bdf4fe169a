#include <benchmark/benchmark.h>

#include "halfres/continuation.hpp"
#include "halfres/free_resolvent.hpp"
#include "halfres/quasimodes.hpp"
#include "halfres/resolvent_norm.hpp"
#include "halfres/resonance_search.hpp"

using namespace halfres;

namespace {

const PotentialModel& well() {
  static const auto m = builtin_model("square_well", std::vector<double>{10.0, 1.0});
  return m;
}

const PotentialModel& gauss() {
  static const auto m = builtin_model("gauss_barrier", std::vector<double>{2.0, 2.0, 0.5});
  return m;
}

void BM_WronskianAdaptive(benchmark::State& state) {
  const double h = 1.0 / static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(wronskian(gauss(), cplx(1.0, -0.02), h).value);
}
BENCHMARK(BM_WronskianAdaptive)->Arg(8)->Arg(12)->Arg(16)->Unit(benchmark::kMicrosecond);

void BM_WronskianFrozenMesh(benchmark::State& state) {
  const WronskianEvaluator ev(gauss(), 0.1, Rect{cplx(0.7, -0.06), cplx(1.3, 0.1)});
  for (auto _ : state) benchmark::DoNotOptimize(ev(cplx(1.0, -0.02)));
}
BENCHMARK(BM_WronskianFrozenMesh)->Unit(benchmark::kMicrosecond);

void BM_ScanSquareWell(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(scan_resonances(well(), Rect{cplx(1.0, -2.0), cplx(8.0, 0.2)}, 1.0).total_winding);
}
BENCHMARK(BM_ScanSquareWell)->Unit(benchmark::kMillisecond);

void BM_DirichletEigensolve(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(dirichlet_eigensolve(gauss(), 2.4, 0.08, 4, n).front().eigenvalue);
}
BENCHMARK(BM_DirichletEigensolve)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

void BM_WeightedResolventNorm(benchmark::State& state) {
  const auto weight = make_weight(0.0, 1.0);
  const cplx lam(1.0, -0.02);
  const auto grid = default_resolvent_grid(std::abs(lam), 0.1, 1.0, weight);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_resolvent_norm(gauss(), lam, 0.1, 1.0, weight, grid));
}
BENCHMARK(BM_WeightedResolventNorm)->Unit(benchmark::kMillisecond);

void BM_WeightedFreeKernelNorm(benchmark::State& state) {
  const auto weight = make_weight(0.0, 1.0);
  const cplx s(static_cast<double>(state.range(0)), -0.1);
  const auto grid = default_kernel_grid(s, 1.0, weight);
  for (auto _ : state) benchmark::DoNotOptimize(weighted_r0_norm(s, 1.0, weight, grid, 0));
}
BENCHMARK(BM_WeightedFreeKernelNorm)->Arg(4)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
