#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "stratosim/conditions.hpp"
#include "stratosim/constants.hpp"
#include "stratosim/kernels.hpp"
#include "stratosim/riemann.hpp"
#include "stratosim/simulate.hpp"
#include "stratosim/stats.hpp"

namespace {

using namespace stratosim;

void BM_BifbmCov(benchmark::State& state) {
  auto kernel = make_kernel({.family = "bifbm", .H = 0.25, .K = 1.0});
  double r = 0.125;
  for (auto _ : state) {
    r = r < 0.875 ? r + 1e-6 : 0.125;
    benchmark::DoNotOptimize(kernel->cov(r, 0.9));
  }
}
BENCHMARK(BM_BifbmCov);

void BM_MedianCov(benchmark::State& state) {
  auto kernel = make_kernel({.family = "phi", .phi = "median"});
  double r = 0.125;
  for (auto _ : state) {
    r = r < 0.875 ? r + 1e-6 : 0.125;
    benchmark::DoNotOptimize(kernel->cov(r, 0.9));
  }
}
BENCHMARK(BM_MedianCov);

void BM_LatticeBuild(benchmark::State& state) {
  auto kernel = make_kernel({.family = "bifbm", .H = 0.25, .K = 1.0});
  const Partition grid(state.range(0), 1.0);
  for (auto _ : state) {
    LatticeCov table(*kernel, grid);
    benchmark::DoNotOptimize(table.cov(1, 1));
  }
}
BENCHMARK(BM_LatticeBuild)->Arg(256)->Arg(1024);

void BM_EtaSums(benchmark::State& state) {
  auto kernel = make_kernel({.family = "bifbm", .H = 0.25, .K = 1.0});
  const Partition grid(state.range(0), 1.0);
  const LatticeCov table(*kernel, grid);
  for (auto _ : state) benchmark::DoNotOptimize(eta_estimate(table, 1.0));
}
BENCHMARK(BM_EtaSums)->Arg(256)->Arg(1024);

void BM_Cholesky(benchmark::State& state) {
  auto kernel = make_kernel({.family = "bifbm", .H = 0.25, .K = 1.0});
  const Partition grid(state.range(0), 1.0);
  const Matrix cov = build_cov_matrix(*kernel, grid);
  for (auto _ : state) {
    Matrix copy = cov;
    benchmark::DoNotOptimize(factorize(std::move(copy)));
  }
}
BENCHMARK(BM_Cholesky)->Arg(64)->Arg(256);

void BM_SamplePaths(benchmark::State& state) {
  auto kernel = make_kernel({.family = "bifbm", .H = 0.25, .K = 1.0});
  const Partition grid(state.range(0), 1.0);
  for (auto _ : state) {
    const PathBatch batch = simulate_paths(*kernel, grid, 16, 42);
    benchmark::DoNotOptimize(batch.values(0, 0));
  }
}
BENCHMARK(BM_SamplePaths)->Arg(64)->Arg(256);

void BM_MidpointSum(benchmark::State& state) {
  auto kernel = make_kernel({.family = "bifbm", .H = 0.25, .K = 1.0});
  const Partition grid(state.range(0), 1.0);
  const PathBatch batch = simulate_paths(*kernel, grid, 4, 42);
  const TestFunction& cubic = test_function("cubic");
  for (auto _ : state)
    for (std::size_t p = 0; p < 4; ++p)
      benchmark::DoNotOptimize(phi_n(batch, p, cubic, 1.0));
}
BENCHMARK(BM_MidpointSum)->Arg(256)->Arg(1024);

void BM_KsTwoSample(benchmark::State& state) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  const std::size_t size = static_cast<std::size_t>(state.range(0));
  std::vector<double> x(size);
  std::vector<double> y(size);
  for (double& v : x) v = normal(rng);
  for (double& v : y) v = normal(rng) * 1.1;
  for (auto _ : state) benchmark::DoNotOptimize(ks_two_sample(x, y));
}
BENCHMARK(BM_KsTwoSample)->Arg(1000)->Arg(10000);

void BM_GapSeries(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(series_a(1e-12));
}
BENCHMARK(BM_GapSeries);

}  // namespace

BENCHMARK_MAIN();
