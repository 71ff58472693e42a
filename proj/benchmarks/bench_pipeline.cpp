// Stage timings across the pipeline, parameterized by the truncation order.
// The decomposition dominates (dense factorizations in the set size, which
// grows like 3M); assembly and the final boundary solve are minor.

#include <benchmark/benchmark.h>

#include <knlayer/halfspace.hpp>
#include <knlayer/problems.hpp>

using namespace knlayer;

static void BM_Assemble(benchmark::State &state) {
    const int M = static_cast<int>(state.range(0));
    const IndexSet set = kramers_index_set(M);
    for (auto _ : state) {
        MomentSystem sys = assemble_system(set, CollisionModel::shakhov());
        benchmark::DoNotOptimize(sys.A.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Assemble)->Arg(10)->Arg(20)->Arg(40)->Arg(80)->Complexity();

static void BM_Decompose(benchmark::State &state) {
    const int M = static_cast<int>(state.range(0));
    const MomentSystem sys = assemble_system(kramers_index_set(M), CollisionModel::shakhov());
    for (auto _ : state) {
        Decomposition dec = decompose(sys);
        benchmark::DoNotOptimize(dec.C_full.data());
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Decompose)->Arg(10)->Arg(20)->Arg(40)->Arg(80)->Complexity();

static void BM_FullProblem(benchmark::State &state) {
    ProblemConfig cfg;
    cfg.kind = ProblemKind::TemperatureJump;
    cfg.M = static_cast<int>(state.range(0));
    for (auto _ : state) {
        ProblemResult res = run_problem(cfg);
        benchmark::DoNotOptimize(res.coefficient);
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_FullProblem)->Arg(10)->Arg(20)->Arg(40)->Arg(80)->Complexity();

static void BM_Evaluate(benchmark::State &state) {
    ProblemConfig cfg;
    cfg.kind = ProblemKind::Kramers;
    cfg.M = static_cast<int>(state.range(0));
    const ProblemResult res = run_problem(cfg);
    double y = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate_solution(res.raw, y).sum());
        y += 1e-3;
    }
}
BENCHMARK(BM_Evaluate)->Arg(20)->Arg(80);

BENCHMARK_MAIN();
