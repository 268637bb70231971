#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "survgame/oracle.hpp"
#include "survgame/partition.hpp"

using namespace survgame;

namespace {

const GameParams kBase{1.0, 2.0, 1.0, 7.0};

const Partition& base_partition() {
  static const Partition part = build_partition(kBase);
  return part;
}

void BM_ClassifyRegime(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(classify_regime(kBase));
}
BENCHMARK(BM_ClassifyRegime)->Unit(benchmark::kMillisecond);

void BM_BuildPartition(benchmark::State& state) {
  PartitionResolution res;
  res.primary_arcs = res.ts_arcs = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(build_partition(kBase, res));
}
BENCHMARK(BM_BuildPartition)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_Locate(benchmark::State& state) {
  const Partition& part = base_partition();
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> r2(1.05 * 1.05, 6.95 * 6.95);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::vector<ReducedState> pts(1024);
  for (ReducedState& s : pts) {
    const double r = std::sqrt(r2(rng));
    const double a = ang(rng);
    s = {r * std::sin(a), r * std::cos(a)};
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(locate(pts[i++ & 1023], part));
  }
}
BENCHMARK(BM_Locate);

void BM_DpSolve(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(dp_solve(kBase, 101, 32, 0.02));
}
BENCHMARK(BM_DpSolve)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
