// Serial vs OpenMP timings of the hot kernels. Arg 0 selects Exec::serial, 1 Exec::parallel.

#include "vpatch/checks.hpp"
#include "vpatch/dynamics.hpp"
#include "vpatch/resonance.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace vpatch;

namespace {

Exec mode(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

RadialDeformation state(int n)
{
    const Grid g(n);
    std::mt19937_64 rng(1);
    return {g, random_field(g, 8, 1e-2, rng)};
}

void BM_EveraRhs(benchmark::State& s)
{
    const EllipseParams p = ellipse_params(2);
    const RadialDeformation xi = state(static_cast<int>(s.range(1)));
    for (auto _ : s) benchmark::DoNotOptimize(evera_rhs(xi, p.omega_gamma, p, mode(s)));
}

void BM_PseudoEnergy(benchmark::State& s)
{
    const EllipseParams p = ellipse_params(2);
    const RadialDeformation xi = state(static_cast<int>(s.range(1)));
    for (auto _ : s) benchmark::DoNotOptimize(pseudo_energy(xi, p, mode(s)));
}

void BM_TrigInterpolate(benchmark::State& s)
{
    const int n = static_cast<int>(s.range(1));
    const Grid g(n);
    const Vec f = sample(g, [](double t) { return std::exp(std::cos(t)); });
    Vec x(n);
    for (int j = 0; j < n; ++j) x[j] = g.node(j) + 0.37;
    for (auto _ : s) benchmark::DoNotOptimize(trig_interpolate(f, x, mode(s)));
}

void BM_MeasureEstimate(benchmark::State& s)
{
    ResonanceConfig cfg;
    cfg.dgamma = 1e-2;
    for (auto _ : s) benchmark::DoNotOptimize(measure_estimate(cfg, mode(s)));
}

void BM_TransversalitySweep(benchmark::State& s)
{
    ResonanceConfig cfg;
    cfg.dgamma = 1e-2;
    for (auto _ : s) benchmark::DoNotOptimize(transversality_sweep(cfg, 2, mode(s)));
}

} // namespace

BENCHMARK(BM_EveraRhs)->ArgsProduct({{0, 1}, {128, 256, 512}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_PseudoEnergy)->ArgsProduct({{0, 1}, {128, 256, 512}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_TrigInterpolate)->ArgsProduct({{0, 1}, {128, 512}})->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MeasureEstimate)->Args({0})->Args({1})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TransversalitySweep)->Args({0})->Args({1})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
