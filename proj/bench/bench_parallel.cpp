// Serial (jobs = 1) against OpenMP (jobs = all cores) for the three
// parallel kernels. Run: ./bench_parallel --benchmark_counters_tabular=true
#include <benchmark/benchmark.h>

#include "ltree/diagnostics.hpp"
#include "ltree/experiment.hpp"
#include "ltree/nj.hpp"
#include "ltree/parallel.hpp"
#include "ltree/samples.hpp"
#include "ltree/synthetic.hpp"

using namespace ltree;

namespace {

int jobs_for(const benchmark::State& state) { return state.range(0) == 0 ? 1 : default_jobs(); }

void BM_QuartetTrials(benchmark::State& state) {
    QuartetExperimentConfig cfg;
    cfg.sample_grid = {500};
    cfg.trials = 64;
    cfg.methods = {MethodSpec::parse("tensor")};
    cfg.seed = 3;
    cfg.jobs = jobs_for(state);
    for (auto _ : state) benchmark::DoNotOptimize(run_quartet_experiment(cfg));
    state.counters["jobs"] = cfg.jobs;
}

void BM_DiagnoseScan(benchmark::State& state) {
    Rng rng(5);
    const LatentModel model = parameterize_tree(random_topology(10, 0.5, rng), {4, 3, 0.5, {}}, rng);
    const DiagnoseOptions opts{4.0, jobs_for(state)};
    for (auto _ : state) benchmark::DoNotOptimize(diagnose(model, opts));
    state.counters["jobs"] = opts.jobs;
}

void BM_DistanceMatrix(benchmark::State& state) {
    Rng rng(7);
    const LatentModel model = parameterize_tree(random_topology(32, 0.5, rng), {6, 6, 0.5, {}}, rng);
    const SampleSet s = sample(model, 5000, rng);
    const int jobs = jobs_for(state);
    for (auto _ : state) benchmark::DoNotOptimize(distance_matrix(s, jobs));
    state.counters["jobs"] = jobs;
}

} // namespace

BENCHMARK(BM_QuartetTrials)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DiagnoseScan)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DistanceMatrix)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
