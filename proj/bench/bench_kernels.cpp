// Serial reference vs OpenMP kernels. Set CONELAB_THREADS to cap the thread count.

#include <benchmark/benchmark.h>

#include <map>

#include "conelab/dec.hpp"
#include "conelab/generators.hpp"
#include "conelab/kahler.hpp"

using namespace conelab;

namespace {

const SimplicialComplex& torus(int N) {
  static std::map<int, SimplicialComplex> cache;
  auto it = cache.find(N);
  if (it == cache.end()) it = cache.emplace(N, flat_torus(3, N)).first;
  return it->second;
}

template <Exec E>
void BM_AssembleMass(benchmark::State& state) {
  const auto& c = torus(static_cast<int>(state.range(0)));
  const int k = static_cast<int>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_mass(c, k, Star::Whitney, E));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(c.count(3)));
}

template <Exec E>
void BM_LeviSweep(benchmark::State& state) {
  const WeightData w = WeightData::make({0.7, 0.9});
  const SampleSet s = stratified_samples(2, 1.0, static_cast<int>(state.range(0)), 160);
  auto f = [&](const CVec& z) { return radius_squared_jet(z) + 0.5 * weighted_radius_squared_jet(z, w); };
  for (auto _ : state) benchmark::DoNotOptimize(levi_sweep(f, s, false, E));
  state.SetItemsProcessed(state.iterations() * static_cast<long>(s.points.size()));
}

}  // namespace

BENCHMARK(BM_AssembleMass<Exec::Serial>)->Args({8, 1})->Args({12, 1})->Args({12, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleMass<Exec::Parallel>)->Args({8, 1})->Args({12, 1})->Args({12, 2})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeviSweep<Exec::Serial>)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LeviSweep<Exec::Parallel>)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

int main(int argc, char** argv) {
  configure_threads_from_env();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
