#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "bss/geo.hpp"

namespace bss::cluster {

struct PointRecord {
  std::string id;
  geo::GeoPoint point;
};

struct Cluster {
  std::string cluster_id;
  std::vector<std::string> member_location_ids;  // sorted
  geo::GeoPoint centroid;
  std::string anchored_station_id;  // empty for candidate clusters

  bool anchored() const { return !anchored_station_id.empty(); }
};

struct ClusterSet {
  std::vector<Cluster> clusters;  // anchored first (by station id), then candidates
  // location_id -> fixed-station id, for locations pulled out before HAC
  std::vector<std::pair<std::string, std::string>> absorbed;  // sorted by location id
};

struct Absorption {
  std::vector<std::pair<std::string, std::string>> absorbed;  // location -> station
  std::vector<PointRecord> remaining;
};

// Pulls every location within `radius` (inclusive) of its nearest fixed
// station out of the clustering input. Distance ties go to the smallest
// station id. Throws DataError when fixed_stations is empty.
Absorption absorb_near_stations(std::span<const PointRecord> locations,
                                std::span<const PointRecord> fixed_stations,
                                geo::Meters radius = geo::meters(50.0));

// Complete-linkage agglomerative clustering under the Haversine metric,
// stopped when the minimal linkage exceeds `cut`. Every returned cluster has
// diameter <= cut. Deterministic: equal-linkage merges pick the pair whose
// sorted (smallest member id, other smallest member id) key is
// lexicographically least. Returns member-id lists sorted by smallest member.
std::vector<std::vector<std::string>> hac_complete_linkage(
    std::span<const PointRecord> points, geo::Meters cut = geo::meters(100.0));

// Anchors fixed stations (centroid pinned to the station, members = station +
// absorbed locations) and attaches arithmetic centroids to candidate clusters.
// Candidate cluster ids are assigned C000001.. in smallest-member order.
ClusterSet finalize_clusters(const std::vector<std::vector<std::string>>& candidate_members,
                             const Absorption& absorption,
                             std::span<const PointRecord> fixed_stations,
                             std::span<const PointRecord> candidate_points);

}  // namespace bss::cluster
