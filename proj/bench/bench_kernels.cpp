// Serial reference loop against the OpenMP kernel for the main batch workloads.
#include <benchmark/benchmark.h>

#include "sdelab/conditions.hpp"
#include "sdelab/control.hpp"
#include "sdelab/estimators.hpp"
#include "sdelab/model.hpp"

using namespace sdelab;

namespace {

Execution exec_for(const benchmark::State& state)
{
    return state.range(0) == 0 ? Execution::reference() : Execution{.workers = static_cast<int>(state.range(0))};
}

void BM_SupMoment(benchmark::State& state)
{
    const auto sys = make_oracle(OracleKind::ou, {.theta = 1.0, .vol = 1.0});
    MonteCarloConfig mc;
    mc.x0 = {0.0};
    mc.level = 10;
    mc.paths = 512;
    const auto exec = exec_for(state);
    for (auto _ : state) benchmark::DoNotOptimize(estimate_sup_moment(sys, 4.0, mc, exec).estimate);
    state.SetItemsProcessed(state.iterations() * static_cast<long>(mc.paths));
}

void BM_Monotonicity(benchmark::State& state)
{
    const auto sys = make_cube_root(3);
    const auto eta = make_zero_control(ControlKind::eta);
    const auto g = ScalarFunction::constant(1.0);
    SamplingSpec spec;
    spec.count = 20000;
    const auto exec = exec_for(state);
    for (auto _ : state) benchmark::DoNotOptimize(check_monotonicity(sys, eta, g, 10.0, 0.5, spec, exec).worst_margin);
    state.SetItemsProcessed(state.iterations() * static_cast<long>(spec.count));
}

void BM_Convergence(benchmark::State& state)
{
    const auto sys = make_cube_root(1);
    MonteCarloConfig mc;
    mc.x0 = {1.0};
    mc.paths = 64;
    const auto exec = exec_for(state);
    for (auto _ : state) benchmark::DoNotOptimize(convergence_diagnostic(sys, {6, 7, 8, 9}, 12, mc, exec));
    state.SetItemsProcessed(state.iterations() * static_cast<long>(mc.paths));
}

// Argument 0 is the serial reference; n > 0 is the OpenMP kernel with n workers.
BENCHMARK(BM_SupMoment)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Monotonicity)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Convergence)->Arg(0)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
