// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>
#include <omp.h>

#include "amdi/mc_oracle.hpp"
#include "amdi/optimizer.hpp"
#include "amdi/pipeline.hpp"

using namespace amdi;

namespace {

DetectorModel detector() {
  DetectorModel m;
  m.distance_km = 200;
  return m;
}

void BM_YieldTableSerial(benchmark::State& st) {
  const DetectorModel m = detector();
  for (auto _ : st) benchmark::DoNotOptimize(YieldTable::build_serial(m, st.range(0)));
}

void BM_YieldTableParallel(benchmark::State& st) {
  const DetectorModel m = detector();
  for (auto _ : st) benchmark::DoNotOptimize(YieldTable(m, st.range(0)));
}

void BM_SimulateSerial(benchmark::State& st) {
  const PairingInputs in = make_pairing_inputs(ProtocolConfig{}, SourceParams{}, 0);
  for (auto _ : st)
    benchmark::DoNotOptimize(simulate_serial(in.alice, in.bob, in.detector, in.timing, st.range(0), 1));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SimulateParallel(benchmark::State& st) {
  const PairingInputs in = make_pairing_inputs(ProtocolConfig{}, SourceParams{}, 0);
  for (auto _ : st) benchmark::DoNotOptimize(simulate(in.alice, in.bob, in.detector, in.timing, st.range(0), 1));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

// Multi-start optimisation with one thread versus all threads.
void BM_OptimizerStarts(benchmark::State& st) {
  OptimizationSpace s;
  s.settings.starts = 8;
  const int saved = omp_get_max_threads();
  omp_set_num_threads(st.range(0) == 0 ? 1 : saved);
  for (auto _ : st) benchmark::DoNotOptimize(optimize_at_distance(s, 200.0, 1));
  omp_set_num_threads(saved);
}

} // namespace

BENCHMARK(BM_YieldTableSerial)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_YieldTableParallel)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateSerial)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SimulateParallel)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OptimizerStarts)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kSecond)->Iterations(1);

BENCHMARK_MAIN();
