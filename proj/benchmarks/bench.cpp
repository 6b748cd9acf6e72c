#include "mildns/harness.hpp"
#include "mildns/stokes.hpp"

#include <benchmark/benchmark.h>

using namespace mildns;

namespace {

VectorField bench_field(int d, int n) {
  return make_initial_data(Domain(d, 2 * pi, n), RandomDivfreeData{0.2, 2.0, 4242});
}

void bm_transform_roundtrip(benchmark::State& state) {
  const Domain dom(int(state.range(0)), 2 * pi, int(state.range(1)));
  const VectorField f = bench_field(dom.d, dom.grid_points);
  for (auto _ : state) {
    auto samples = to_physical(dom, f.comp[0]);
    benchmark::DoNotOptimize(to_spectral(dom, samples));
  }
}
BENCHMARK(bm_transform_roundtrip)->Args({2, 64})->Args({2, 256})->Args({3, 32})->Args({3, 64});

void bm_dealiased_product(benchmark::State& state) {
  const Domain dom(int(state.range(0)), 2 * pi, int(state.range(1)));
  const VectorField f = bench_field(dom.d, dom.grid_points);
  const ScalarField a = component(f, 0), b = component(f, 1);
  for (auto _ : state) benchmark::DoNotOptimize(dealiased_product(a, b));
}
BENCHMARK(bm_dealiased_product)->Args({2, 64})->Args({2, 256})->Args({3, 32})->Args({3, 64});

void bm_leray_project(benchmark::State& state) {
  const Domain dom(int(state.range(0)), 2 * pi, int(state.range(1)));
  VectorField f = bench_field(dom.d, dom.grid_points);
  f.comp[0][3] += 0.1;  // keep the projection from being the identity
  for (auto _ : state) benchmark::DoNotOptimize(leray_project(f));
}
BENCHMARK(bm_leray_project)->Args({2, 256})->Args({3, 64});

void bm_duhamel_sweep(benchmark::State& state) {
  const Domain dom(int(state.range(0)), 2 * pi, int(state.range(1)));
  const int segments = int(state.range(2));
  const TimeGrid grid(1.0, segments, 2.0);
  const Trajectory u = heat_trajectory(bench_field(dom.d, dom.grid_points), grid);
  for (auto _ : state) benchmark::DoNotOptimize(duhamel_bilinear(u, u));
}
BENCHMARK(bm_duhamel_sweep)->Args({2, 64, 16})->Args({2, 128, 16})->Args({3, 32, 12});

void bm_solve_mild(benchmark::State& state) {
  const Domain dom(int(state.range(0)), 2 * pi, int(state.range(1)));
  const VectorField a = bench_field(dom.d, dom.grid_points);
  SolverConfig cfg;
  cfg.segments = int(state.range(2));
  for (auto _ : state) benchmark::DoNotOptimize(solve_mild(a, cfg));
}
BENCHMARK(bm_solve_mild)->Args({2, 64, 12})->Args({3, 32, 10})->Unit(benchmark::kMillisecond);

void bm_mixed_norm(benchmark::State& state) {
  const Domain dom(int(state.range(0)), 2 * pi, int(state.range(1)));
  const TimeGrid grid(1.0, 16, 2.0);
  // steep spectrum: the flow-derivative levels must stay resolved in band
  const Trajectory u =
      heat_trajectory(make_initial_data(dom, RandomDivfreeData{0.2, 6.0, 4242}), grid);
  MixedNormSpec spec;
  spec.p = spec.q = real(dom.d + 2);
  spec.m = int(state.range(2));
  spec.n = 1;
  spec.delta = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(weighted_mixed_norm(u, spec));
}
BENCHMARK(bm_mixed_norm)->Args({2, 64, 0})->Args({2, 64, 1})->Args({3, 32, 1})
    ->Unit(benchmark::kMillisecond);

void bm_kernel_gradient_norm(benchmark::State& state) {
  const Domain dom(int(state.range(0)), 2 * pi, int(state.range(1)));
  const real s = 9.0 * dom.spacing() * dom.spacing();
  for (auto _ : state) benchmark::DoNotOptimize(kernel_gradient_norm(dom, s, real(dom.d)));
}
BENCHMARK(bm_kernel_gradient_norm)->Args({2, 128})->Args({3, 48})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
