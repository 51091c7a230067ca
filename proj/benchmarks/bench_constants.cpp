#include <benchmark/benchmark.h>

#include <cmath>

#include "femcert/constants.hpp"

using namespace femcert;

static void BM_TranscendentalRoots(benchmark::State& state) {
    for (auto _ : state) {
        benchmark::DoNotOptimize(solve_c1_transcendental());
        benchmark::DoNotOptimize(solve_c12_transcendental());
    }
}
BENCHMARK(BM_TranscendentalRoots);

static void BM_EigenLowerBound(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(eigen_constant_lower(ConstantId::c0, 1.0, M_PI / 2.0, n));
    }
}
BENCHMARK(BM_EigenLowerBound)->Arg(8)->Arg(16)->Unit(benchmark::kMillisecond);

static void BM_C45Bracket(benchmark::State& state) {
    const int d = static_cast<int>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(c45_bracket(ConstantId::c5, 0.6, M_PI / 2.0, d));
    }
}
BENCHMARK(BM_C45Bracket)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);
