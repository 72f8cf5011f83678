#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bss/graph.hpp"

namespace bss::community {

struct LouvainConfig {
  std::uint64_t seed = 0;
  double resolution = 1.0;  // 1.0 = plain modularity
  double min_gain = 1e-7;
  int max_passes = 20;
};

// Throws ConfigError on out-of-range fields.
void validate(const LouvainConfig& cfg);

struct Partition {
  std::vector<int> assignment;  // node index -> community id, dense from 0
  double modularity = 0.0;
  graph::Granularity granularity = graph::Granularity::kNull;
  std::string strategy;
  int passes = 0;
  std::vector<double> pass_q;  // objective after each pass, non-decreasing

  int num_communities() const;
};

// Newman modularity of an assignment:
//   Q = sum_c [ S_in(c) / 2m - (S_tot(c))^2 / 4m^2 ]
// where m is the total undirected edge weight (loops once), S_in sums the
// adjacency over ordered intra-community pairs (A_uu = 2 * loop weight) and
// S_tot sums weighted degrees. Throws DataError("empty graph") when m = 0.
double modularity(const graph::UndirectedProjection& p, std::span<const int> assignment);

// Two-phase Louvain: seeded-shuffle local moving (best positive gain, ties to
// the lowest community id) followed by aggregation of communities into
// super-nodes, repeated until a pass gains no more than cfg.min_gain or
// cfg.max_passes is reached. Deterministic for a fixed (graph, seed).
Partition louvain(const graph::UndirectedProjection& p, const LouvainConfig& cfg);

struct DetectionInput {
  const graph::UndirectedProjection* projection = nullptr;
  graph::Granularity granularity = graph::Granularity::kNull;
  graph::ProjectionStrategy strategy = graph::ProjectionStrategy::kAggregate;
};

// Runs louvain on each projection with the same seed.
std::vector<Partition> detect_all(std::span<const DetectionInput> inputs,
                                  const LouvainConfig& cfg);

}  // namespace bss::community
