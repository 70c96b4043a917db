// Serial reference against OpenMP for the sampling kernels.
//
//   build/bench/bench_kernels --benchmark_filter=grassmann
//   OMP_NUM_THREADS=8 build/bench/bench_kernels

#include <benchmark/benchmark.h>

#include "pconvex/grassmann.hpp"
#include "pconvex/harmonic.hpp"
#include "pconvex/synthesis.hpp"

using namespace pconvex;

namespace {

SymMatrix test_matrix(std::size_t n) {
  Rng rng(5);
  std::normal_distribution<double> N;
  SymMatrix q(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i; j < n; ++j)
      q.set(i, j, N(rng));
  return q;
}

void BM_grassmann_serial(benchmark::State &state) {
  const SymMatrix q = test_matrix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(grassmannian_min_trace_serial(q, 3, 20000, 1));
  state.SetItemsProcessed(state.iterations() * 20000);
}

void BM_grassmann_omp(benchmark::State &state) {
  const SymMatrix q = test_matrix(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state)
    benchmark::DoNotOptimize(grassmannian_min_trace_omp(q, 3, 20000, 1));
  state.SetItemsProcessed(state.iterations() * 20000);
}

BENCHMARK(BM_grassmann_serial)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_grassmann_omp)->Arg(4)->Arg(10)->Unit(benchmark::kMillisecond);

const ImplicitDomain &torus() {
  static const ImplicitDomain d = catalog("solid_torus", {2.5, 1});
  return d;
}

void BM_certify(benchmark::State &state, Exec exec) {
  const auto pts = sample_boundary(torus(), 500, 1);
  CertifyOptions opts;
  opts.exec = exec;
  for (auto _ : state)
    benchmark::DoNotOptimize(certify_boundary(torus(), 2, pts, opts));
}
BENCHMARK_CAPTURE(BM_certify, serial, Exec::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_certify, omp, Exec::parallel)->Unit(benchmark::kMillisecond);

const DefiningFunction &torus_rho() {
  static const DefiningFunction df = synthesize(torus(), 2);
  return df;
}

void BM_verify(benchmark::State &state, Exec exec) {
  const DefiningFunction &df = torus_rho();
  const Grid grid = make_grid(df.domain(), df.params().c, {1000, 1000, 250, 3});
  for (auto _ : state)
    benchmark::DoNotOptimize(verify(df, 2, grid, exec));
}
BENCHMARK_CAPTURE(BM_verify, serial, Exec::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_verify, omp, Exec::parallel)->Unit(benchmark::kMillisecond);

void BM_subharmonic(benchmark::State &state, Exec exec) {
  const auto f = ConformalHarmonicMap::fitted(MapTag::enneper_patch, {-1, 1, -1, 1},
                                              Vec{2.5, 0, 0}, 0.9);
  for (auto _ : state)
    benchmark::DoNotOptimize(subharmonicity_sweep(torus_rho().field(), f, {}, exec));
}
BENCHMARK_CAPTURE(BM_subharmonic, serial, Exec::serial)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_subharmonic, omp, Exec::parallel)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
