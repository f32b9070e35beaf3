#include <benchmark/benchmark.h>

#include "burrscan/gaussian_fit.hpp"
#include "burrscan/ks.hpp"
#include "burrscan/synth.hpp"

namespace {

using namespace burrscan;

LengthHistogram benign_histogram(std::uint64_t names) {
  BenignModel m;
  m.unique_names = names;
  m.max_visits = 1;
  return length_histogram(build_space(records_of(generate_benign(m)), SpaceKind::kDnss));
}

void BM_FitGaussian(benchmark::State& state) {
  const auto hist = benign_histogram(static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_gaussian(hist));
}
BENCHMARK(BM_FitGaussian)->Arg(5'000)->Arg(50'000);

void BM_FitGaussianWithSpike(benchmark::State& state) {
  auto hist = benign_histogram(50'000);
  hist.add(67, static_cast<std::uint64_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(fit_gaussian(hist));
}
BENCHMARK(BM_FitGaussianWithSpike)->Arg(500)->Arg(5'000)->Arg(50'000);

void BM_KsStatistic(benchmark::State& state) {
  const auto hist = benign_histogram(50'000);
  const auto fit = fit_gaussian(hist);
  for (auto _ : state) benchmark::DoNotOptimize(ks_statistic(hist, fit));
}
BENCHMARK(BM_KsStatistic);

}  // namespace

BENCHMARK_MAIN();
