#include <benchmark/benchmark.h>

#include <random>

#include "isingmkt/spectra.hpp"
#include "isingmkt/xcorr.hpp"

using namespace isingmkt;

namespace {

ReturnPanel noise_panel(std::size_t n, std::size_t t) {
  std::mt19937_64 eng(3);
  std::normal_distribution<double> normal;
  ReturnPanel p(n, t);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t s = 0; s < t; ++s) p(k, s) = normal(eng);
  return p;
}

void BM_RollingCorrelation(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto panel = noise_panel(n, 4000);
  WindowSpec spec;
  for (auto _ : state) {
    auto w = rolling_correlations(panel, spec);
    benchmark::DoNotOptimize(w.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(window_count(4000, spec)));
}

void BM_EigSym(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  WindowSpec spec;
  spec.window = 2 * n;
  const auto w = rolling_correlations(noise_panel(n, 2 * n), spec);
  for (auto _ : state) {
    auto ed = eig_sym(w.front().matrix);
    benchmark::DoNotOptimize(ed.values.data());
  }
}

}  // namespace

BENCHMARK(BM_RollingCorrelation)->Arg(20)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EigSym)->Arg(20)->Arg(100)->Arg(300)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
