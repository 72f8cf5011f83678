#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "bss/cluster.hpp"
#include "bss/geo.hpp"
#include "bss/ingest.hpp"

namespace bss::select {

// Trip endpoints per location: one count per rental start, one per rental end.
struct EndpointCounts {
  std::map<std::string, std::uint64_t> outbound;
  std::map<std::string, std::uint64_t> inbound;
  std::uint64_t total_trips = 0;
};

EndpointCounts count_endpoints(std::span<const ingest::Rental> rentals);

// Degree of one cluster: trip endpoints landing on any member location.
// A trip that starts and ends inside the cluster contributes 2.
std::uint64_t compute_degree(std::span<const std::string> member_location_ids,
                             const EndpointCounts& counts);

// Throws DataError on an empty set.
std::uint64_t min_fixed_degree(std::span<const std::uint64_t> fixed_degrees);

struct Candidate {
  std::string cluster_id;
  geo::GeoPoint centroid;
  std::uint64_t degree = 0;
  std::uint64_t score = 0;
};

struct FixedStationInfo {
  std::string station_id;
  geo::GeoPoint point;
  std::uint64_t degree = 0;
};

struct SelectionResult {
  std::vector<Candidate> selected;  // score descending, cluster_id ascending
  std::uint64_t degree_threshold = 0;
  int elimination_passes = 0;
};

// Station selection:
//   score <- degree, zeroed when degree < min fixed degree or the centroid is
//   within `proximity` (inclusive) of a fixed station; then repeat pairwise
//   elimination -- of two positive-score candidates within `proximity`, the
//   lower-degree one (larger cluster_id on equal degree) is zeroed -- until no
//   positive-score pair is near. Pairs are scanned strongest-first.
SelectionResult select_stations(std::vector<Candidate> candidates,
                                std::span<const FixedStationInfo> fixed,
                                geo::Meters proximity = geo::meters(250.0));

struct Station {
  std::string station_id;
  geo::GeoPoint point;
  enum class Origin { kFixed, kSelected } origin = Origin::kFixed;
};

struct StationSet {
  std::vector<Station> stations;                 // sorted by station_id
  std::map<std::string, std::string> assignment;  // location_id -> station_id
};

// Locations in anchored or selected clusters map to their own station; every
// other location maps to the Haversine-nearest station (ties to the smallest
// station id). Selected stations adopt their cluster_id as station_id.
StationSet reassign(const cluster::ClusterSet& clusters,
                    std::span<const Candidate> selected,
                    std::span<const cluster::PointRecord> candidate_points);

}  // namespace bss::select
