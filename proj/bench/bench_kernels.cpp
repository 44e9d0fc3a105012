// Serial vs OpenMP kernels: multi-scalar multiplication and one curve-tree level.

#include <benchmark/benchmark.h>

#include "boomerang/curve_tree.hpp"
#include "boomerang/msm.hpp"
#include "boomerang/random.hpp"

using namespace boomerang;

namespace {

struct MsmInput {
  std::vector<Fe> ks;
  std::vector<Point> ps;
};

MsmInput msm_input(size_t n) {
  const Curve& c = secp_secq()->E1();
  DeterministicRandom rng(n);
  MsmInput in;
  for (size_t i = 0; i < n; ++i) {
    in.ks.push_back(c.scalar().random(rng));
    in.ps.push_back(c.mul(c.scalar().random(rng), c.G));
  }
  return in;
}

void BM_msm_serial(benchmark::State& state) {
  MsmInput in = msm_input(static_cast<size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(msm_serial(secp_secq()->E1(), in.ks, in.ps));
}

void BM_msm_parallel(benchmark::State& state) {
  MsmInput in = msm_input(static_cast<size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(msm_parallel(secp_secq()->E1(), in.ks, in.ps));
}

template <bool Parallel>
void BM_tree_level(benchmark::State& state) {
  CurveTreeParams p = CurveTreeParams::make(secp_secq(), 2, 32);
  MsmInput in = msm_input(static_cast<size_t>(state.range(0)));
  for (auto _ : state) {
    auto level = Parallel ? tree_level_parallel(in.ps, p, 1, {}) : tree_level_serial(in.ps, p, 1, {});
    benchmark::DoNotOptimize(level);
  }
}

}  // namespace

BENCHMARK(BM_msm_serial)->Arg(4)->Arg(64)->Arg(1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_msm_parallel)->Arg(64)->Arg(1024)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_tree_level<false>)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_tree_level<true>)->Arg(1024)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
