// Parallel kernels against the serial reference.

#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "rfilt/benchmark.hpp"
#include "rfilt/kernels.hpp"
#include "rfilt/reference.hpp"

namespace {

using namespace rfilt;

VolumeImage volume(std::size_t n) {
  PhantomOptions o;
  o.size = n;
  return generate_phantom(PhantomKind::noise, o);
}

void set_threads(benchmark::State& state, int index) {
  const int t = static_cast<int>(state.range(index));
  omp_set_num_threads(t > 0 ? t : omp_get_num_procs());
}

void BM_SeparableParallel(benchmark::State& state) {
  const auto img = volume(static_cast<std::size_t>(state.range(0)));
  set_threads(state, 1);
  const auto k = laws_kernel(parse_laws_combination("L5E5E5"));
  for (auto _ : state) benchmark::DoNotOptimize(convolve_separable(img, k, BoundaryMode::mirror()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}

void BM_SeparableSerial(benchmark::State& state) {
  const auto img = volume(static_cast<std::size_t>(state.range(0)));
  const auto k = laws_kernel(parse_laws_combination("L5E5E5"));
  for (auto _ : state) benchmark::DoNotOptimize(reference::convolve_separable(img, k, BoundaryMode::mirror()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}

void BM_DenseParallel(benchmark::State& state) {
  const auto img = volume(static_cast<std::size_t>(state.range(0)));
  set_threads(state, 1);
  const auto k = log_kernel(1.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(convolve_full(img, k, BoundaryMode::mirror()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}

void BM_DenseSerial(benchmark::State& state) {
  const auto img = volume(static_cast<std::size_t>(state.range(0)));
  const auto k = log_kernel(1.0, 3);
  for (auto _ : state) benchmark::DoNotOptimize(reference::convolve_full(img, k, BoundaryMode::mirror()));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}

void BM_PooledLawsParallel(benchmark::State& state) {
  const auto img = volume(static_cast<std::size_t>(state.range(0)));
  set_threads(state, 1);
  const auto k = laws_kernel(parse_laws_combination("L5E5E5"));
  for (auto _ : state) benchmark::DoNotOptimize(pooled_equivariant(img, {k}, BoundaryMode::mirror(), PoolMode::max));
}

void BM_PooledLawsSerial(benchmark::State& state) {
  const auto img = volume(static_cast<std::size_t>(state.range(0)));
  const auto k = laws_kernel(parse_laws_combination("L5E5E5"));
  for (auto _ : state)
    benchmark::DoNotOptimize(reference::pooled_equivariant(img, {k}, BoundaryMode::mirror(), PoolMode::max));
}

// second argument: thread count, 0 = all processors
BENCHMARK(BM_SeparableParallel)->ArgsProduct({{32, 64}, {1, 0}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SeparableSerial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseParallel)->ArgsProduct({{32, 64}, {1, 0}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DenseSerial)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PooledLawsParallel)->ArgsProduct({{32}, {1, 0}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_PooledLawsSerial)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
