#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bss/community.hpp"
#include "bss/graph.hpp"
#include "bss/select.hpp"

namespace bss::report {

struct CommunityStats {
  int community_id = 0;
  std::uint64_t old_stations = 0;
  std::uint64_t new_stations = 0;
  std::uint64_t within = 0;  // trips starting and ending in the community
  std::uint64_t out = 0;     // starting here, ending elsewhere
  std::uint64_t in = 0;      // starting elsewhere, ending here

  std::uint64_t stations() const { return old_stations + new_stations; }
  std::uint64_t total() const { return within + out + in; }
};

// Whole-period directed trip counts per community, from the T_Null graph.
std::vector<CommunityStats> community_stats(const community::Partition& partition,
                                            const graph::TripGraph& t_null);

// Fraction of trips that start and end in the same community. Throws
// DataError on zero trips.
double self_containment(std::span<const CommunityStats> stats);

struct TemporalProfile {
  int community_id = 0;
  graph::Granularity granularity = graph::Granularity::kDay;
  std::vector<double> shares;  // per bucket, summing to 1 when trips > 0
};

// Bucket shares of trips originating at each community's stations.
std::vector<TemporalProfile> temporal_profiles(const community::Partition& partition,
                                               const graph::TripGraph& bucketed);

// Per origin class (pre_existing / selected / total): stations, directed trip
// counts and aggregated directed station-pair edge counts.
struct OriginClassStats {
  std::string origin_class;
  std::uint64_t stations = 0;
  std::uint64_t trips_from = 0;
  std::uint64_t trips_to = 0;
  std::uint64_t edges_from = 0;
  std::uint64_t edges_to = 0;
};

std::vector<OriginClassStats> origin_class_stats(const graph::TripGraph& t_null);

// RFC 7946 FeatureCollection of Point features ([lon, lat]), one per station,
// with station_id, community_id, origin and degree properties.
std::string export_geojson(std::span<const select::Station> stations,
                           const std::map<std::string, int>& community_of,
                           const std::map<std::string, std::uint64_t>& degree_of);

}  // namespace bss::report
