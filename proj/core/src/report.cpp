#include "bss/report.hpp"

#include <json.hpp>

#include "bss/errors.hpp"

namespace bss::report {

std::vector<CommunityStats> community_stats(const community::Partition& partition,
                                            const graph::TripGraph& t_null) {
  if (partition.assignment.size() != t_null.node_count()) {
    throw DataError("partition does not cover all graph nodes");
  }
  const int num = partition.num_communities();
  std::vector<CommunityStats> stats(num);
  for (int c = 0; c < num; ++c) stats[c].community_id = c;

  for (std::size_t u = 0; u < t_null.node_count(); ++u) {
    auto& s = stats[partition.assignment[u]];
    if (t_null.node_is_fixed[u]) {
      ++s.old_stations;
    } else {
      ++s.new_stations;
    }
  }
  for (const auto& [key, w] : t_null.edges) {
    const int cu = partition.assignment[key.src];
    const int cv = partition.assignment[key.dst];
    if (cu == cv) {
      stats[cu].within += w;
    } else {
      stats[cu].out += w;
      stats[cv].in += w;
    }
  }
  return stats;
}

double self_containment(std::span<const CommunityStats> stats) {
  std::uint64_t within = 0;
  std::uint64_t trips = 0;
  for (const auto& s : stats) {
    within += s.within;
    trips += s.within + s.out;  // each trip counted once, at its origin
  }
  if (trips == 0) throw DataError("no trips in network");
  return static_cast<double>(within) / static_cast<double>(trips);
}

std::vector<TemporalProfile> temporal_profiles(const community::Partition& partition,
                                               const graph::TripGraph& bucketed) {
  if (bucketed.granularity == graph::Granularity::kNull) {
    throw DataError("temporal profiles need a T_Day or T_Hour graph");
  }
  if (partition.assignment.size() != bucketed.node_count()) {
    throw DataError("partition does not cover all graph nodes");
  }
  const int buckets = graph::bucket_count(bucketed.granularity);
  const int num = partition.num_communities();
  std::vector<TemporalProfile> profiles(num);
  for (int c = 0; c < num; ++c) {
    profiles[c].community_id = c;
    profiles[c].granularity = bucketed.granularity;
    profiles[c].shares.assign(buckets, 0.0);
  }
  for (const auto& [key, w] : bucketed.edges) {
    profiles[partition.assignment[key.src]].shares[key.bucket] += static_cast<double>(w);
  }
  for (auto& p : profiles) {
    double sum = 0.0;
    for (const double s : p.shares) sum += s;
    if (sum > 0.0) {
      for (double& s : p.shares) s /= sum;
    }
  }
  return profiles;
}

std::vector<OriginClassStats> origin_class_stats(const graph::TripGraph& t_null) {
  OriginClassStats fixed{"pre_existing", 0, 0, 0, 0, 0};
  OriginClassStats selected{"selected", 0, 0, 0, 0, 0};
  for (std::size_t u = 0; u < t_null.node_count(); ++u) {
    (t_null.node_is_fixed[u] ? fixed : selected).stations += 1;
  }
  for (const auto& [key, w] : t_null.edges) {
    auto& src = t_null.node_is_fixed[key.src] ? fixed : selected;
    auto& dst = t_null.node_is_fixed[key.dst] ? fixed : selected;
    src.trips_from += w;
    dst.trips_to += w;
    src.edges_from += 1;
    dst.edges_to += 1;
  }
  OriginClassStats total{"total",
                         fixed.stations + selected.stations,
                         fixed.trips_from + selected.trips_from,
                         fixed.trips_to + selected.trips_to,
                         fixed.edges_from + selected.edges_from,
                         fixed.edges_to + selected.edges_to};
  return {fixed, selected, total};
}

std::string export_geojson(std::span<const select::Station> stations,
                           const std::map<std::string, int>& community_of,
                           const std::map<std::string, std::uint64_t>& degree_of) {
  nlohmann::ordered_json features = nlohmann::ordered_json::array();
  for (const auto& st : stations) {
    const auto community = community_of.find(st.station_id);
    if (community == community_of.end()) {
      throw DataError("station '" + st.station_id + "' has no community assignment");
    }
    const auto degree = degree_of.find(st.station_id);
    nlohmann::ordered_json feature;
    feature["type"] = "Feature";
    feature["geometry"] = {{"type", "Point"},
                           {"coordinates", {st.point.lon, st.point.lat}}};
    feature["properties"] = {
        {"station_id", st.station_id},
        {"community_id", community->second},
        {"origin", st.origin == select::Station::Origin::kFixed ? "fixed" : "selected"},
        {"degree", degree == degree_of.end() ? 0 : degree->second}};
    features.push_back(std::move(feature));
  }
  nlohmann::ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = std::move(features);
  return doc.dump(2) + "\n";
}

}  // namespace bss::report
