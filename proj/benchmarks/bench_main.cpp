// Microbenchmarks for the hot paths: cycle evaluation, partition
// enumeration, sampling, and the Monte Carlo likelihood. Built only
// when google-benchmark is available; not part of the test suite.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "spikecycle/asymptotics.hpp"
#include "spikecycle/cycles.hpp"
#include "spikecycle/llr.hpp"
#include "spikecycle/model.hpp"
#include "spikecycle/rng.hpp"
#include "spikecycle/sampler.hpp"

namespace {

using namespace spikecycle;

Matrix gauss_matrix(int n, int p, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = rng.normal();
  return x;
}

ModelSpec bench_model(int n, int p) {
  ModelSpec spec;
  spec.variant = Variant::kUnnormalized;
  spec.n = n;
  spec.p = p;
  spec.kappa = 1;
  spec.theta_prior = PriorSpec::scaled_rademacher(0.8);
  spec.u_prior = PriorSpec::rademacher(1);
  return spec;
}

void BM_CycleFast(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Matrix x = gauss_matrix(60, 120, 42);
  for (auto _ : state) benchmark::DoNotOptimize(cycle_fast(x, k));
}
BENCHMARK(BM_CycleFast)->DenseRange(2, 6)->Unit(benchmark::kMillisecond);

void BM_CycleFastThreads(benchmark::State& state) {
  CycleOptions opts;
  opts.threads = static_cast<int>(state.range(0));
  const Matrix x = gauss_matrix(60, 120, 42);
  for (auto _ : state) benchmark::DoNotOptimize(cycle_fast(x, 6, opts));
}
BENCHMARK(BM_CycleFastThreads)->Arg(1)->Arg(2)->Arg(4)
    ->Unit(benchmark::kMillisecond);

// Orders 1..6 in one call; memoization shares contractions across k.
void BM_CycleVector(benchmark::State& state) {
  const Matrix x = gauss_matrix(60, 120, 42);
  for (auto _ : state) benchmark::DoNotOptimize(cycle_vector(x, 6));
}
BENCHMARK(BM_CycleVector)->Unit(benchmark::kMillisecond);

void BM_EnumeratePartitions(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(enumerate_partitions(k));
}
BENCHMARK(BM_EnumeratePartitions)->DenseRange(4, 10);

void BM_Sample(benchmark::State& state) {
  const ModelSpec spec = bench_model(300, 600);
  std::uint64_t seed = 1;
  for (auto _ : state)
    benchmark::DoNotOptimize(sample(spec, Hypothesis::kAlternative, seed++));
}
BENCHMARK(BM_Sample)->Unit(benchmark::kMillisecond);

void BM_AnovaStatistic(benchmark::State& state) {
  const ModelSpec spec = bench_model(200, 400);
  const Matrix x = sample(spec, Hypothesis::kNull, 7).values;
  for (auto _ : state)
    benchmark::DoNotOptimize(anova_statistic(x, spec, 6));
}
BENCHMARK(BM_AnovaStatistic)->Unit(benchmark::kMillisecond);

void BM_SigmaBSq(benchmark::State& state) {
  Vector h(3);
  h << 0.9, 0.5, 0.2;
  for (auto _ : state) benchmark::DoNotOptimize(sigma_b_sq(h, 2.0));
}
BENCHMARK(BM_SigmaBSq);

void BM_McLikelihood(benchmark::State& state) {
  const ModelSpec spec = bench_model(4, 4);
  const Matrix x = sample(spec, Hypothesis::kAlternative, 11).values;
  for (auto _ : state)
    benchmark::DoNotOptimize(mc_likelihood(x, spec, 10000, 13));
}
BENCHMARK(BM_McLikelihood)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
