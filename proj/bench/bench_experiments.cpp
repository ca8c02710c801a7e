// Serial reference vs OpenMP run loop for the experiment harness.

#include <benchmark/benchmark.h>

#include "ils/experiments.hpp"

namespace {

ils::ExperimentConfig probability_config() {
    ils::ExperimentConfig cfg;
    cfg.n = 20;
    cfg.runs = 200;
    cfg.sigma_grid = {0.1, 0.2, 0.3};
    cfg.methods = {ils::Method::Qr, ils::Method::Sqrd, ils::Method::Vblast, ils::Method::LllPermute,
                   ils::Method::Lll};
    return cfg;
}

ils::ExperimentConfig empirical_config() {
    ils::ExperimentConfig cfg;
    cfg.n = 8;
    cfg.runs = 20;
    cfg.trials_per_run = 2000;
    cfg.sigma_grid = {0.1, 0.2, 0.3};
    cfg.methods = {ils::Method::Qr, ils::Method::Lll};
    return cfg;
}

void BM_Probability(benchmark::State& state) {
    const auto exec = static_cast<ils::Execution>(state.range(0));
    const auto cfg = probability_config();
    for (auto _ : state) benchmark::DoNotOptimize(ils::run_probability_experiment(cfg, exec));
}

void BM_Empirical(benchmark::State& state) {
    const auto exec = static_cast<ils::Execution>(state.range(0));
    const auto cfg = empirical_config();
    for (auto _ : state) benchmark::DoNotOptimize(ils::run_empirical_success(cfg, exec));
}

void BM_Complexity(benchmark::State& state) {
    const auto exec = static_cast<ils::Execution>(state.range(0));
    auto cfg = empirical_config();
    cfg.trials_per_run = 0;
    for (auto _ : state) benchmark::DoNotOptimize(ils::run_complexity_experiment(cfg, {}, exec));
}

// Arg 0: serial reference, arg 1: parallel.
BENCHMARK(BM_Probability)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Empirical)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Complexity)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
