#include <benchmark/benchmark.h>

#include "burrscan/pipeline.hpp"

namespace {

using namespace burrscan;

void BM_AnalyzeWindow(benchmark::State& state) {
  SynthSpec spec = SynthSpec::defaults();
  const WindowPlan plan = cut_windows(records_of(synthesize(spec)), 30 * kDay);
  const WindowSlice& slice = plan.slices.at(1);
  for (auto _ : state) benchmark::DoNotOptimize(analyze_window(slice));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(slice.records.size()));
}
BENCHMARK(BM_AnalyzeWindow)->Unit(benchmark::kMillisecond);

void BM_RunPipeline(benchmark::State& state) {
  const auto records = records_of(synthesize(SynthSpec::defaults()));
  for (auto _ : state) benchmark::DoNotOptimize(run_pipeline(records, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(records.size()));
}
BENCHMARK(BM_RunPipeline)->Unit(benchmark::kMillisecond);

void BM_BuildSpace(benchmark::State& state) {
  const auto records = records_of(synthesize(SynthSpec::defaults()));
  for (auto _ : state) benchmark::DoNotOptimize(build_space(records, SpaceKind::kAdnss));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(records.size()));
}
BENCHMARK(BM_BuildSpace)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
