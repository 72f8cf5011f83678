#include "bss/graph.hpp"

#include <cmath>
#include <unordered_map>

#include "bss/errors.hpp"

namespace bss::graph {

int bucket_count(Granularity g) {
  switch (g) {
    case Granularity::kNull: return 1;
    case Granularity::kDay: return 7;
    case Granularity::kHour: return 24;
  }
  return 1;
}

std::string_view granularity_name(Granularity g) {
  switch (g) {
    case Granularity::kNull: return "t_null";
    case Granularity::kDay: return "t_day";
    case Granularity::kHour: return "t_hour";
  }
  return "t_null";
}

Granularity parse_granularity(std::string_view name) {
  if (name == "t_null") return Granularity::kNull;
  if (name == "t_day") return Granularity::kDay;
  if (name == "t_hour") return Granularity::kHour;
  throw ConfigError("unknown granularity '" + std::string(name) +
                    "' (expected t_null, t_day or t_hour)");
}

int bucket_of(const ingest::Rental& rental, Granularity g) {
  switch (g) {
    case Granularity::kNull: return kNoBucket;
    case Granularity::kDay: return timeutil::weekday_monday0(rental.start_time);
    case Granularity::kHour: return timeutil::hour_of_day(rental.start_time);
  }
  return kNoBucket;
}

TripGraph build_graph(std::span<const ingest::Rental> rentals,
                      const std::map<std::string, std::string>& assignment,
                      std::span<const select::Station> stations, Granularity g) {
  TripGraph out;
  out.granularity = g;
  out.node_ids.reserve(stations.size());
  std::unordered_map<std::string, std::uint32_t> node_index;
  for (const auto& st : stations) {  // stations arrive sorted by id
    node_index.emplace(st.station_id, static_cast<std::uint32_t>(out.node_ids.size()));
    out.node_ids.push_back(st.station_id);
    out.node_is_fixed.push_back(st.origin == select::Station::Origin::kFixed);
  }

  auto station_of = [&](const std::string& location_id,
                        const std::string& rental_id) -> std::uint32_t {
    const auto a = assignment.find(location_id);
    if (a == assignment.end()) {
      throw DataError("rental '" + rental_id + "': location '" + location_id +
                      "' has no station assignment");
    }
    const auto n = node_index.find(a->second);
    if (n == node_index.end()) {
      throw DataError("rental '" + rental_id + "': assigned station '" + a->second +
                      "' is not a graph node");
    }
    return n->second;
  };

  for (const auto& r : rentals) {
    const EdgeKey key{station_of(r.rental_location_id, r.rental_id),
                      station_of(r.return_location_id, r.rental_id), bucket_of(r, g)};
    ++out.edges[key];
    ++out.total_trips;
  }
  return out;
}

std::string_view strategy_name(ProjectionStrategy s) {
  return s == ProjectionStrategy::kAggregate ? "aggregate" : "bucket-similarity";
}

ProjectionStrategy parse_strategy(std::string_view name) {
  if (name == "aggregate") return ProjectionStrategy::kAggregate;
  if (name == "bucket-similarity") return ProjectionStrategy::kBucketSimilarity;
  throw ConfigError("unknown projection strategy '" + std::string(name) +
                    "' (expected aggregate or bucket-similarity)");
}

double UndirectedProjection::total_weight() const {
  double m = 0.0;
  for (const auto& [key, w] : edges) m += w;
  return m;
}

UndirectedProjection project_for_communities(const TripGraph& g, ProjectionStrategy s) {
  UndirectedProjection out;
  out.node_ids = g.node_ids;
  out.node_is_fixed = g.node_is_fixed;

  std::map<std::pair<std::uint32_t, std::uint32_t>, double> aggregate;
  for (const auto& [key, w] : g.edges) {
    const auto u = std::min(key.src, key.dst);
    const auto v = std::max(key.src, key.dst);
    aggregate[{u, v}] += static_cast<double>(w);
  }

  if (s == ProjectionStrategy::kAggregate) {
    out.edges = std::move(aggregate);
    return out;
  }

  // Per-station bucket profile: endpoints of trips touching the station,
  // counted per bucket (a self-loop trip counts twice).
  const int buckets = bucket_count(g.granularity);
  std::vector<std::vector<double>> profile(g.node_count(),
                                           std::vector<double>(buckets, 0.0));
  for (const auto& [key, w] : g.edges) {
    const int b = key.bucket == kNoBucket ? 0 : key.bucket;
    profile[key.src][b] += static_cast<double>(w);
    profile[key.dst][b] += static_cast<double>(w);
  }
  std::vector<double> norm(g.node_count(), 0.0);
  for (std::size_t u = 0; u < profile.size(); ++u) {
    double sq = 0.0;
    for (const double x : profile[u]) sq += x * x;
    norm[u] = std::sqrt(sq);
  }
  auto cosine = [&](std::uint32_t u, std::uint32_t v) -> double {
    if (norm[u] == 0.0 || norm[v] == 0.0) return 0.0;
    if (profile[u] == profile[v]) return 1.0;  // exact, no sqrt rounding
    double dot = 0.0;
    for (int b = 0; b < buckets; ++b) dot += profile[u][b] * profile[v][b];
    return std::min(dot / (norm[u] * norm[v]), 1.0);
  };

  for (const auto& [key, w] : aggregate) {
    const double multiplier =
        key.first == key.second ? 2.0 : 1.0 + cosine(key.first, key.second);
    out.edges[key] = w * multiplier;
  }
  return out;
}

}  // namespace bss::graph
