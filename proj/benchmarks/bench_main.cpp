#include <benchmark/benchmark.h>

#include <vector>

#include "cutoff/graph.hpp"
#include "cutoff/profile.hpp"
#include "cutoff/rng.hpp"
#include "cutoff/simulator.hpp"
#include "cutoff/spectral.hpp"
#include "cutoff/stationary.hpp"

using namespace cutoff;

static void BM_EventThroughput(benchmark::State& state) {
  auto g = build_torus(1, int(state.range(0)));
  SplitMix rng(1, 0);
  std::vector<int> eta(g.size(), 0);
  for (int i = 0; i < g.size() / 2; i++) eta[i] = 1;
  double events_per_unit = g.time_scale * double(g.edges.size());
  double total = 0;
  for (auto _ : state) {
    advance_state(g, eta, 0.1, rng);
    total += 0.1 * events_per_unit;
  }
  state.SetItemsProcessed(int64_t(total));
}
BENCHMARK(BM_EventThroughput)->Arg(32)->Arg(128)->Arg(512);

static void BM_Eigendecompose(benchmark::State& state) {
  auto g = build_torus(1, int(state.range(0)));
  auto lap = assemble_laplacian(g);
  for (auto _ : state) {
    auto sp = eigendecompose(lap);
    benchmark::DoNotOptimize(sp.eigenvalues.data());
  }
}
BENCHMARK(BM_Eigendecompose)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

static void BM_SegmentOracle(benchmark::State& state) {
  for (auto _ : state) {
    auto roots = segment_eigen_oracle(int(state.range(0)), 2.0, 0.5, 5);
    benchmark::DoNotOptimize(roots.data());
  }
}
BENCHMARK(BM_SegmentOracle)->Arg(128)->Arg(1024)->Unit(benchmark::kMillisecond);

static void BM_StationaryCorrelation(benchmark::State& state) {
  int n = int(state.range(0));
  double s = 2.0 * (n + 1) / (2.0 * n * n);
  std::vector<FaceSpec> faces = {FaceSpec::open(0.1 * s, 0.9 * s, 0.0),
                                 FaceSpec::open(0.9 * s, 0.1 * s, 0.0)};
  auto g = build_lattice(1, n, faces);
  auto lap = assemble_laplacian(g);
  auto st = solve_stationary_density(g, lap);
  for (auto _ : state) {
    auto corr = stationary_correlation(g, st.rho_ss);
    benchmark::DoNotOptimize(corr.l1_offdiag);
  }
}
BENCHMARK(BM_StationaryCorrelation)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
