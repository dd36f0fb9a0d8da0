#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "montage/permutation.hpp"
#include "montage/rng.hpp"

using namespace montage;

static void BM_InversionCount(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  Rng rng(1);
  const Permutation p = random_permutation_with_inversions(n, max_inversions(n) / 2, rng);
  for (auto _ : state) benchmark::DoNotOptimize(inversion_count(p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_InversionCount)->RangeMultiplier(4)->Range(16, 1 << 14)->Complexity();

static void BM_RandomShuffleWithInversions(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<std::size_t> items(n);
  std::iota(items.begin(), items.end(), 0);
  Rng rng(2);
  for (auto _ : state) {
    const std::uint64_t target = sample_inversion_target(n, Difficulty::medium, rng);
    benchmark::DoNotOptimize(random_shuffle_with_inversions<std::size_t>(items, target, rng));
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_RandomShuffleWithInversions)->RangeMultiplier(2)->Range(8, 512)->Complexity();
