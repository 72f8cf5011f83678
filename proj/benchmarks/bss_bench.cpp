#include <benchmark/benchmark.h>

#include <vector>

#include "bss/cluster.hpp"
#include "bss/community.hpp"
#include "bss/geo.hpp"
#include "bss/graph.hpp"
#include "bss/rng.hpp"
#include "bss/synth.hpp"

namespace {

std::vector<bss::cluster::PointRecord> box_points(std::uint64_t seed, int n, double box_km) {
  bss::Rng rng(seed);
  std::vector<bss::cluster::PointRecord> pts;
  pts.reserve(n);
  for (int i = 0; i < n; ++i) {
    char id[16];
    std::snprintf(id, sizeof(id), "P%05d", i);
    pts.push_back({id, {53.30 + rng.uniform01() * box_km / 111.195,
                        -6.35 + rng.uniform01() * box_km / (111.195 * 0.597)}});
  }
  return pts;
}

void BM_Haversine(benchmark::State& state) {
  bss::Rng rng(1);
  std::vector<bss::geo::GeoPoint> pts(1024);
  for (auto& p : pts) p = {rng.uniform(-90, 90), rng.uniform(-180, 180)};
  std::size_t i = 0;
  for (auto _ : state) {
    const auto d =
        bss::geo::haversine_distance(pts[i % pts.size()], pts[(i + 7) % pts.size()]);
    benchmark::DoNotOptimize(d);
    ++i;
  }
}
BENCHMARK(BM_Haversine);

void BM_HacCompleteLinkage(benchmark::State& state) {
  const auto pts = box_points(7, static_cast<int>(state.range(0)), 2.0);
  for (auto _ : state) {
    auto clusters = bss::cluster::hac_complete_linkage(pts, bss::geo::meters(100));
    benchmark::DoNotOptimize(clusters);
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HacCompleteLinkage)->Range(250, 16000)->Complexity()->Unit(benchmark::kMillisecond);

void BM_Louvain(benchmark::State& state) {
  // Planted-partition graph with 8 blocks.
  const int n = static_cast<int>(state.range(0));
  bss::Rng rng(5);
  bss::graph::UndirectedProjection p;
  char buf[16];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "N%05d", i);
    p.node_ids.emplace_back(buf);
    p.node_is_fixed.push_back(false);
  }
  const int block = n / 8;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const bool same = i / block == j / block;
      if (rng.uniform01() < (same ? 0.2 : 0.002)) {
        p.edges[{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)}] =
            1.0 + rng.uniform01();
      }
    }
  }
  for (auto _ : state) {
    auto part = bss::community::louvain(p, {42});
    benchmark::DoNotOptimize(part);
  }
  state.SetComplexityN(n);
}
BENCHMARK(BM_Louvain)->Range(64, 1024)->Complexity()->Unit(benchmark::kMillisecond);

void BM_SynthGenerate(benchmark::State& state) {
  bss::synth::SynthConfig cfg;
  cfg.trips = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    auto out = bss::synth::generate(cfg, 42);
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_SynthGenerate)->Arg(10000)->Arg(62000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
