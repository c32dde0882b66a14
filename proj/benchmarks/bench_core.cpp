#include <benchmark/benchmark.h>

#include <cmath>

#include "choquard/extremals.hpp"
#include "choquard/functional.hpp"
#include "choquard/riesz.hpp"

namespace {

using namespace choquard;

GridPtr bench_grid(int M) { return build_grid(GridSpec{7, 60.0, M, 2.0}); }

void BM_KernelBuild(benchmark::State& state) {
    GridPtr grid = bench_grid(static_cast<int>(state.range(0)));
    RieszOptions opts;
    opts.quadrature_order = 256;
    opts.threads = 1;
    for (auto _ : state) {
        RieszKernel kernel = build_kernel(grid, 2.0, opts);
        benchmark::DoNotOptimize(kernel.matrix().data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KernelBuild)->RangeMultiplier(2)->Range(250, 2000)->Complexity()
    ->Unit(benchmark::kMillisecond);

void BM_Convolve(benchmark::State& state) {
    GridPtr grid = bench_grid(static_cast<int>(state.range(0)));
    RieszOptions opts;
    opts.quadrature_order = 128;
    const RieszKernel kernel = build_kernel(grid, 2.0, opts);
    const RadialFunction f =
        sample_extremal(grid, {ExtremalKind::Mu, 1.0, 1.0});
    for (auto _ : state) {
        RadialFunction out = convolve(kernel, f);
        benchmark::DoNotOptimize(out.values().data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Convolve)->RangeMultiplier(2)->Range(250, 2000)->Complexity()
    ->Unit(benchmark::kMicrosecond);

void BM_EnergyAndGradient(benchmark::State& state) {
    GridPtr grid = bench_grid(static_cast<int>(state.range(0)));
    RieszOptions opts;
    opts.quadrature_order = 128;
    const RieszKernel kernel = build_kernel(grid, 2.0, opts);
    const NonlinearityParams params = NonlinearityParams::doubly_critical(7, 2.0);
    const RadialFunction u =
        sample_extremal(grid, {ExtremalKind::Mu, 1.0, 1.0});
    for (auto _ : state) {
        EnergyGradient eg = energy_and_gradient(kernel, params, u);
        benchmark::DoNotOptimize(eg.gradient_norm);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EnergyAndGradient)->RangeMultiplier(2)->Range(250, 2000)
    ->Complexity()->Unit(benchmark::kMicrosecond);

void BM_HelmholtzSolve(benchmark::State& state) {
    GridPtr grid = bench_grid(static_cast<int>(state.range(0)));
    const RadialFunction rhs =
        sample_extremal(grid, {ExtremalKind::Mu, 1.0, 1.0});
    for (auto _ : state) {
        RadialFunction v = solve_helmholtz(rhs);
        benchmark::DoNotOptimize(v.values().data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HelmholtzSolve)->RangeMultiplier(2)->Range(250, 2000)
    ->Complexity()->Unit(benchmark::kMicrosecond);

void BM_RayMax(benchmark::State& state) {
    GridPtr grid = bench_grid(500);
    RieszOptions opts;
    opts.quadrature_order = 128;
    const RieszKernel kernel = build_kernel(grid, 2.0, opts);
    const NonlinearityParams params = NonlinearityParams::doubly_critical(7, 2.0);
    const RayProfile ray = ray_profile(
        kernel, params, sample_extremal(grid, {ExtremalKind::Mu, 1.0, 1.0}));
    for (auto _ : state) benchmark::DoNotOptimize(ray_max(ray));
}
BENCHMARK(BM_RayMax);

}  // namespace

BENCHMARK_MAIN();
