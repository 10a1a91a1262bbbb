// Serial vs OpenMP timings for the Z-scan kernels.

#include <benchmark/benchmark.h>

#include "nlo/kernels.hpp"
#include "nlo/zscan.hpp"

namespace {

using nlo::kernels::Execution;

const nlo::ZscanParams kTruth{0.39, 0.2, 2.6e-4, 0.0, 1.0};

void BM_transmittance_profile(benchmark::State& state, Execution exec) {
  const auto z = nlo::linspace(-2e-3, 2e-3, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nlo::kernels::transmittance_profile(kTruth, z, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_grid_extrema(benchmark::State& state, Execution exec) {
  const auto x = nlo::linspace(-10.0, 10.0, static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(nlo::kernels::grid_extrema(0.39, 0.2, x, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_monte_carlo(benchmark::State& state, Execution exec) {
  const auto z = nlo::linspace(-1e-3, 1e-3, 40);
  const auto runs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(nlo::kernels::zscan_monte_carlo(kTruth, z, 0.01, 1, runs, exec));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_transmittance_profile, serial, Execution::serial)->Range(1 << 10, 1 << 20);
BENCHMARK_CAPTURE(BM_transmittance_profile, parallel, Execution::parallel)->Range(1 << 10, 1 << 20);
BENCHMARK_CAPTURE(BM_grid_extrema, serial, Execution::serial)->Range(1 << 10, 1 << 20);
BENCHMARK_CAPTURE(BM_grid_extrema, parallel, Execution::parallel)->Range(1 << 10, 1 << 20);
BENCHMARK_CAPTURE(BM_monte_carlo, serial, Execution::serial)->Arg(16)->Arg(64);
BENCHMARK_CAPTURE(BM_monte_carlo, parallel, Execution::parallel)->Arg(16)->Arg(64);

BENCHMARK_MAIN();
