#include <benchmark/benchmark.h>

#include "mgk/analytic.hpp"
#include "mgk/coupling.hpp"
#include "mgk/sim.hpp"

using namespace mgk;

namespace {

void BM_simulator(benchmark::State& state, Policy p, int k) {
    ServiceDist dist(Uniform{0, 2});
    SimOptions opts;
    opts.n_completions = 50000;
    opts.record_jobs = false;
    PolicySpec spec{p, p == Policy::FB ? 0.01 : 0.0};
    auto arr = ArrivalSequence::poisson(0.8, dist, 1);
    for (auto _ : state) {
        auto stats = run(spec, k, arr, opts);
        benchmark::DoNotOptimize(stats.end_time);
    }
    state.SetItemsProcessed(state.iterations() * opts.n_completions);
}

void BM_trajectory_tracking(benchmark::State& state) {
    ServiceDist dist(Uniform{0, 2});
    SimOptions opts;
    opts.n_completions = 20000;
    opts.record_jobs = false;
    opts.x_grid = {0.25, 0.5, 1.0, 1.5};
    auto arr = ArrivalSequence::poisson(0.8, dist, 1);
    for (auto _ : state) {
        auto stats = run({Policy::SRPT, 0.0}, 10, arr, opts);
        benchmark::DoNotOptimize(stats.traj.relwork_le[0]);
    }
    state.SetItemsProcessed(state.iterations() * opts.n_completions);
}

void BM_coupled(benchmark::State& state) {
    ServiceDist dist(Uniform{0, 2});
    auto arrivals = ArrivalSequence::poisson(0.8, dist, 1).take(300);
    std::vector<double> grid{0.25, 0.5, 1.0, 1.5};
    for (auto _ : state) {
        auto traces = run_coupled(standard_pair(Policy::SRPT), 10, arrivals, grid, {});
        benchmark::DoNotOptimize(traces[0].max_delta);
    }
}

void BM_bound_I(benchmark::State& state) {
    LoadContext ctx(0.8, ServiceDist(Uniform{0, 2}), 10);
    for (auto _ : state) benchmark::DoNotOptimize(bound_I(ctx, 1.0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_simulator, srpt_k10, Policy::SRPT, 10);
BENCHMARK_CAPTURE(BM_simulator, srpt_k1, Policy::SRPT, 1);
BENCHMARK_CAPTURE(BM_simulator, fcfs_k10, Policy::FCFS, 10);
BENCHMARK_CAPTURE(BM_simulator, fb_k10, Policy::FB, 10);
BENCHMARK(BM_trajectory_tracking);
BENCHMARK(BM_coupled);
BENCHMARK(BM_bound_I);

BENCHMARK_MAIN();
