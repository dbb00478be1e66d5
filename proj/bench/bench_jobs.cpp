// Serial reference vs OpenMP job runner on a batch of small experiments.
// Both paths produce identical outcomes (see unit.experiment); only wall
// time differs.

#include "mrnn/experiment.hpp"

#include <benchmark/benchmark.h>

#include <vector>

namespace {

std::vector<mrnn::ExperimentJob> make_jobs(int count) {
    std::vector<mrnn::ExperimentJob> jobs;
    for (int i = 0; i < count; ++i) {
        mrnn::ExperimentJob j;
        j.data = mrnn::SyntheticSpec::defaults(mrnn::SyntheticKind::ar_markov);
        j.data.length = 1000;
        j.data.seed = static_cast<std::uint64_t>(i + 1);
        j.hp.hidden_dim = 8;
        j.hp.max_epochs = 5;
        j.hp.seed = static_cast<std::uint64_t>(i + 1);
        jobs.push_back(j);
    }
    return jobs;
}

void BM_JobsSerial(benchmark::State& state) {
    const auto jobs = make_jobs(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mrnn::run_jobs_serial(jobs));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_JobsParallel(benchmark::State& state) {
    const auto jobs = make_jobs(static_cast<int>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(mrnn::run_jobs_parallel(jobs));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_JobsSerial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_JobsParallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
