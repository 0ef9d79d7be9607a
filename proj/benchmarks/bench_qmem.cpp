#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "qmem/fock.hpp"
#include "qmem/homodyne.hpp"
#include "qmem/network.hpp"

namespace {

void BM_RunChain(benchmark::State& state) {
  qmem::ChainConfig c;
  for (int i = 0; i < state.range(0); ++i) c.nodes.push_back({120.0, 4.0, 0.0, qmem::InitPolicy::NeutralHalf});
  const auto drive = qmem::SignalSpec::sin_squared(400.0);
  const qmem::SamplingGrid grid(0.4, 1200.0);
  for (auto _ : state) benchmark::DoNotOptimize(qmem::run_chain(c, drive, grid));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()) * state.range(0));
}
BENCHMARK(BM_RunChain)->Arg(1)->Arg(2)->Arg(9);

void BM_ShotNoiseChain(benchmark::State& state) {
  qmem::ChainConfig c;
  c.nodes.push_back({120.0, 4.0, 0.0, qmem::InitPolicy::NeutralHalf});
  c.detection[0].shot_noise = true;
  c.detection[0].efficiency = 0.1;
  const auto drive = qmem::SignalSpec::sin_squared(400.0);
  const qmem::SamplingGrid grid(0.4, 1200.0);
  for (auto _ : state) benchmark::DoNotOptimize(qmem::run_chain(c, drive, grid));
}
BENCHMARK(BM_ShotNoiseChain);

void BM_TwoPulsePipeline(benchmark::State& state) {
  const qmem::SourceModel source{0.5, 0.95, 0.915};
  std::vector<double> refl(static_cast<std::size_t>(state.range(0)), 0.4);
  for (auto _ : state) benchmark::DoNotOptimize(qmem::fock::two_pulse_pipeline(source, refl, 1.0, 0.7));
}
BENCHMARK(BM_TwoPulsePipeline)->Arg(0)->Arg(1)->Arg(2);

void BM_VisibilityRealistic(benchmark::State& state) {
  for (auto _ : state)
    benchmark::DoNotOptimize(qmem::homodyne::visibility_realistic({0.4, 0.95, 0.915}, 0.5, 0.3));
}
BENCHMARK(BM_VisibilityRealistic);

void BM_LobeArea(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(n), y(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    x[k] = std::sin(t);
    y[k] = std::sin(2.0 * t);
  }
  for (auto _ : state) benchmark::DoNotOptimize(qmem::lobe_area(x, y));
}
BENCHMARK(BM_LobeArea)->Arg(101)->Arg(1001);

void BM_SeriesParallel(benchmark::State& state) {
  const double refl[] = {0.3, 0.6};
  for (auto _ : state)
    benchmark::DoNotOptimize(qmem::series_parallel_equivalence(refl, {0.8, 1.0, 1.0}, 0.4));
}
BENCHMARK(BM_SeriesParallel);

}  // namespace

BENCHMARK_MAIN();
