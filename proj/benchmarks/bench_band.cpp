#include <benchmark/benchmark.h>

#include "burrscan/burr.hpp"
#include "burrscan/synth.hpp"

namespace {

using namespace burrscan;

void BM_BandAndBurrs(benchmark::State& state) {
  BenignModel m;
  m.max_visits = 1;
  auto hist = length_histogram(build_space(records_of(generate_benign(m)), SpaceKind::kDnss));
  hist.add(67, 5000);
  const auto fit = fit_gaussian(hist);
  for (auto _ : state) {
    const auto band = delineation_band(hist, fit, 0.05);
    benchmark::DoNotOptimize(detect_burrs(hist, band, BurrMode::kTwoSided));
  }
}
BENCHMARK(BM_BandAndBurrs);

void BM_ExcessBound(benchmark::State& state) {
  int step = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(excess_bound(step / 1000.0, 0.0061));
    step = step == 1000 ? 0 : step + 1;
  }
}
BENCHMARK(BM_ExcessBound);

}  // namespace

BENCHMARK_MAIN();
