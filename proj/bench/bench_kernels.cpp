#include <benchmark/benchmark.h>

#include <cmath>

#include "kbilip/homeo.hpp"
#include "kbilip/kernels.hpp"
#include "kbilip/verifier.hpp"

using namespace kbilip;

namespace {

PolyGerm quartic() {
  Polynomial p(2);
  p.add_term({2, 0}, 1.0);
  p.add_term({0, 2}, -1.0);
  p.add_term({2, 2}, 0.5);
  p.add_term({4, 0}, 0.25);
  return PolyGerm::scalar(p, 4);
}

const PiecewiseHomeo& homeo() {
  static const PiecewiseHomeo H(quartic(), quartic().scaled(2.0), CoordChange::identity(2),
                                SignBranch::Plus);
  return H;
}

PointCloud cloud(int dirs) {
  SampleScheme s;
  s.num_radii = 12;
  s.dirs_per_radius = dirs;
  return fiber_cloud(quartic(), s);
}

void BM_map_points(benchmark::State& state, kernels::Exec exec) {
  const auto c = cloud(static_cast<int>(state.range(0)));
  const auto H = as_map(homeo());
  for (auto _ : state) benchmark::DoNotOptimize(kernels::map_points(H.forward, c, 3, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.size()));
}

void BM_pair_ratio(benchmark::State& state, kernels::Exec exec) {
  const auto c = cloud(static_cast<int>(state.range(0)));
  const auto img = kernels::map_points(as_map(homeo()).forward, c, 3);
  const auto pairs = build_pairs(c, {});
  for (auto _ : state)
    benchmark::DoNotOptimize(kernels::max_pair_ratio(c.coords(), 3, img, 3, pairs, exec));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pairs.size()));
}

void BM_block_distance(benchmark::State& state, bool parallel) {
  const auto c = cloud(static_cast<int>(state.range(0)));
  const auto a = kernels::map_points(as_map(homeo()).forward, c, 3);
  const auto& b = c.coords();
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel ? kernels::max_block_distance_parallel(a, b, 3)
                                      : kernels::max_block_distance_serial(a, b, 3));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(c.size()));
}

}  // namespace

BENCHMARK_CAPTURE(BM_map_points, serial, kernels::Exec::Serial)->Arg(256)->Arg(2048);
BENCHMARK_CAPTURE(BM_map_points, parallel, kernels::Exec::Parallel)->Arg(256)->Arg(2048);
BENCHMARK_CAPTURE(BM_pair_ratio, serial, kernels::Exec::Serial)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(BM_pair_ratio, parallel, kernels::Exec::Parallel)->Arg(64)->Arg(256);
BENCHMARK_CAPTURE(BM_block_distance, serial, false)->Arg(2048);
BENCHMARK_CAPTURE(BM_block_distance, parallel, true)->Arg(2048);

BENCHMARK_MAIN();
