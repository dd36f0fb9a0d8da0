#include <benchmark/benchmark.h>

#include <vector>

#include "montage/eval.hpp"
#include "montage/rng.hpp"

using namespace montage;

static void BM_AucRoc(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(3);
  std::vector<double> pos(n), neg(n);
  for (auto& v : pos) v = static_cast<double>(rng.uniform(0, 20)) / 20.0;
  for (auto& v : neg) v = static_cast<double>(rng.uniform(0, 20)) / 20.0;
  for (auto _ : state) benchmark::DoNotOptimize(auc_roc(pos, neg));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_AucRoc)->RangeMultiplier(4)->Range(64, 1 << 16)->Complexity();
