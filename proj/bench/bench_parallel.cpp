#include <benchmark/benchmark.h>

#include <vector>

#include "igr1d/dynamics.hpp"
#include "igr1d/scenarios.hpp"
#include "igr1d/studies.hpp"

using namespace igr1d;

namespace {

Execution mode(const benchmark::State& state) {
  return state.range(1) != 0 ? Execution::parallel : Execution::serial;
}

/// Cold-start frames; the serial run is the reference the parallel one must reproduce.
void BM_Evolve(benchmark::State& state) {
  const auto sc = make_scenario("sinewave");
  const Grid g = sc.grid(static_cast<std::size_t>(state.range(0)));
  const auto mu = sc.measure(g);
  const auto data = make_regularized_data(sc.initial_velocity(g), g);
  IgrParams params;
  params.alpha = 1e-2;
  std::vector<double> times;
  for (int k = 0; k < 16; ++k) times.push_back(0.1 * k);
  EvolveOptions options;
  options.warm_start = false;
  options.execution = mode(state);
  for (auto _ : state) benchmark::DoNotOptimize(evolve(data, mu, g, params, times, options));
}

void BM_Gamma(benchmark::State& state) {
  const auto sc = make_scenario("sinewave");
  const Grid g = sc.grid(static_cast<std::size_t>(state.range(0)));
  const auto mu = sc.measure(g);
  const auto u0 = sc.initial_velocity(g);
  const std::vector<double> alphas{1e-1, 5e-2, 2e-2, 1e-2, 5e-3, 2e-3, 1e-3};
  for (auto _ : state) {
    benchmark::DoNotOptimize(gamma_study(u0, mu, g, 2.0 * sc.shock_time, alphas, {}, DataMode::regularized, mode(state)));
  }
}

void BM_Stability(benchmark::State& state) {
  const Grid g = make_uniform_grid(0.0, 1.0, static_cast<std::size_t>(state.range(0)));
  const auto mu = uniform_measure(g);
  for (auto _ : state) benchmark::DoNotOptimize(stability_study(32, 42, mu, g, 1.0, 1e-2, {}, mode(state)));
}

}  // namespace

BENCHMARK(BM_Evolve)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Gamma)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Stability)->ArgsProduct({{256}, {0, 1}})->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
