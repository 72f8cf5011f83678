#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bss/ingest.hpp"
#include "bss/select.hpp"
#include "bss/timeutil.hpp"

namespace bss::graph {

enum class Granularity { kNull, kDay, kHour };

// 1 / 7 / 24.
int bucket_count(Granularity g);

std::string_view granularity_name(Granularity g);  // "t_null" / "t_day" / "t_hour"
Granularity parse_granularity(std::string_view name);

// Sentinel bucket for kNull edges.
inline constexpr int kNoBucket = -1;

// kNull -> kNoBucket; kDay -> weekday of start (Monday = 0); kHour -> start hour.
int bucket_of(const ingest::Rental& rental, Granularity g);

struct EdgeKey {
  std::uint32_t src = 0;
  std::uint32_t dst = 0;
  int bucket = kNoBucket;

  friend auto operator<=>(const EdgeKey&, const EdgeKey&) = default;
};

// Directed weighted trip graph over the final station set. Nodes cover every
// station, so isolated fixed stations stay representable.
struct TripGraph {
  std::vector<std::string> node_ids;  // sorted station ids
  std::vector<bool> node_is_fixed;
  Granularity granularity = Granularity::kNull;
  std::map<EdgeKey, std::uint64_t> edges;
  std::uint64_t total_trips = 0;

  std::size_t node_count() const { return node_ids.size(); }
};

// One keyed edge per (src station, dst station, bucket). Throws DataError
// naming the rental id when an endpoint has no station assignment.
TripGraph build_graph(std::span<const ingest::Rental> rentals,
                      const std::map<std::string, std::string>& assignment,
                      std::span<const select::Station> stations, Granularity g);

enum class ProjectionStrategy { kAggregate, kBucketSimilarity };

std::string_view strategy_name(ProjectionStrategy s);
// Throws ConfigError on an unknown name.
ProjectionStrategy parse_strategy(std::string_view name);

// Undirected weighted graph; a self-loop of weight w contributes 2w to its
// node's adjacency mass (A_uu = 2w).
struct UndirectedProjection {
  std::vector<std::string> node_ids;
  std::vector<bool> node_is_fixed;
  // key (u, v) with u <= v; u == v is a loop
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> edges;

  // Total edge weight m, loops counted once.
  double total_weight() const;
};

// `aggregate`: w{u,v} = sum over buckets and both directions.
// `bucket-similarity`: aggregate weight times (1 + cosine similarity of the
// endpoints' per-bucket trip-count profiles), a multiplier in [1, 2].
UndirectedProjection project_for_communities(const TripGraph& g, ProjectionStrategy s);

}  // namespace bss::graph
