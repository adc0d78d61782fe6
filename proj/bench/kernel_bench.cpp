// Side-by-side timings of the OpenMP kernels against their serial
// references. Not part of ctest; run manually:
//   ./build/lqfleet_kernel_bench [--benchmark_filter=...]

#include <benchmark/benchmark.h>

#include <random>

#include "lqfleet/controller.hpp"
#include "lqfleet/scenario_io.hpp"
#include "lqfleet/simulator.hpp"

using namespace lqfleet;

namespace {

Matrix random_matrix(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> entry(-1.0, 1.0);
  Matrix m(n, n);
  for (double& v : m.data()) v = entry(rng);
  return m;
}

void BM_matmul_serial(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix a = random_matrix(n, 1);
  const Matrix b = random_matrix(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(matmul_serial(a, b));
  }
}

void BM_matmul_openmp(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Matrix a = random_matrix(n, 1);
  const Matrix b = random_matrix(n, 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(matmul(a, b));
  }
}

struct DemoFixture {
  Scenario scenario = build_scenario(demo_config("switched", 1.0, 2024), ".");
  GainSchedule schedule = backward_pass(scenario);
};

void BM_monte_carlo_serial(benchmark::State& state) {
  static const DemoFixture fixture;
  const int paths = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        monte_carlo_serial(fixture.scenario, fixture.schedule, paths, 7));
  }
}

void BM_monte_carlo_openmp(benchmark::State& state) {
  static const DemoFixture fixture;
  const int paths = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(monte_carlo(fixture.scenario, fixture.schedule, paths, 7));
  }
}

void BM_backward_pass(benchmark::State& state) {
  static const DemoFixture fixture;
  for (auto _ : state) {
    benchmark::DoNotOptimize(backward_pass(fixture.scenario));
  }
}

}  // namespace

BENCHMARK(BM_matmul_serial)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_matmul_openmp)->Arg(64)->Arg(128)->Arg(256);
BENCHMARK(BM_monte_carlo_serial)->Arg(256)->Arg(1024);
BENCHMARK(BM_monte_carlo_openmp)->Arg(256)->Arg(1024);
BENCHMARK(BM_backward_pass);

BENCHMARK_MAIN();
