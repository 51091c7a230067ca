#include <benchmark/benchmark.h>

#include "femcert/certify.hpp"
#include "femcert/field.hpp"
#include "femcert/flux.hpp"

using namespace femcert;

static void BM_MeshGeneration(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    for (auto _ : state) {
        Mesh m = generate_friedrichs_keller(n);
        benchmark::DoNotOptimize(m.n_edges());
    }
}
BENCHMARK(BM_MeshGeneration)->Arg(32)->Arg(128);

static void BM_CrSolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Mesh mesh = generate_friedrichs_keller(n);
    ScalarField f = sinsin_load();
    for (auto _ : state) {
        CrSolution u = solve_poisson_cr(mesh, f);
        benchmark::DoNotOptimize(u.edge_value.data());
    }
}
BENCHMARK(BM_CrSolve)->Arg(16)->Arg(64);

static void BM_FluxPostprocess(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Mesh mesh = generate_friedrichs_keller(n);
    PwConstant fbar = project_mean(mesh, sinsin_load());
    CrSolution u_star = solve_modified_cr(mesh, fbar);
    for (auto _ : state) {
        RtFlux p = build_rt_flux(mesh, u_star, fbar);
        benchmark::DoNotOptimize(p.c.data());
    }
}
BENCHMARK(BM_FluxPostprocess)->Arg(64);

static void BM_CertifiedRun(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    Mesh mesh = generate_friedrichs_keller(n);
    ScalarField f = sinsin_load();
    ScalarField exact = sinsin_exact();
    for (auto _ : state) {
        RunResult r = certified_solve(mesh, f, &exact);
        benchmark::DoNotOptimize(r.report.apost_flux);
    }
}
BENCHMARK(BM_CertifiedRun)->Arg(16);
