// Serial reference kernels against the OpenMP ones on the same inputs.
// Arguments: modes per axis, then 0 = serial, 1 = parallel.

#include <benchmark/benchmark.h>

#include "torusns/initial_data.hpp"
#include "torusns/kernels.hpp"
#include "torusns/operators.hpp"
#include "torusns/spectral.hpp"

using namespace torusns;

namespace {

SpectralVector field(int modes) { return random_bandlimited(TorusGrid::make(3, modes), 1, modes / 4, 1.0); }

kernels::Execution mode(const benchmark::State& state) {
  return state.range(1) ? kernels::Execution::parallel : kernels::Execution::serial;
}

void label(benchmark::State& state) {
  state.SetLabel(state.range(1) ? "openmp" : "serial");
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0) * state.range(0));
}

void BM_DjSupNorm(benchmark::State& state) {
  auto u = field(static_cast<int>(state.range(0)));
  kernels::ScopedExecution m(mode(state));
  for (auto _ : state) benchmark::DoNotOptimize(dj_sup_norm(u, 2));
  label(state);
}

void BM_Leray(benchmark::State& state) {
  auto u = normalize_sup(random_modes(TorusGrid::make(3, static_cast<int>(state.range(0))), 2, 4), 1.0);
  kernels::ScopedExecution m(mode(state));
  for (auto _ : state) benchmark::DoNotOptimize(leray_project(u));
  label(state);
}

void BM_Heat(benchmark::State& state) {
  auto u = field(static_cast<int>(state.range(0)));
  kernels::ScopedExecution m(mode(state));
  for (auto _ : state) benchmark::DoNotOptimize(apply_heat_semigroup(u, 0.1));
  label(state);
}

void BM_Nonlinear(benchmark::State& state) {
  auto u = field(static_cast<int>(state.range(0)));
  kernels::ScopedExecution m(mode(state));
  for (auto _ : state) benchmark::DoNotOptimize(nonlinear_term(u));
  label(state);
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int modes : {16, 32, 64}) {
    for (int par : {0, 1}) b->Args({modes, par});
  }
  b->Unit(benchmark::kMicrosecond);
}

}  // namespace

BENCHMARK(BM_DjSupNorm)->Apply(sizes);
BENCHMARK(BM_Leray)->Apply(sizes);
BENCHMARK(BM_Heat)->Apply(sizes);
BENCHMARK(BM_Nonlinear)->Apply(sizes);

BENCHMARK_MAIN();
