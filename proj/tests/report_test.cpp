#include "bss/report.hpp"

#include <set>

#include <doctest.h>
#include <json.hpp>

#include "bss/errors.hpp"
#include "bss/rng.hpp"

using namespace bss::report;
using bss::graph::Granularity;
using bss::graph::TripGraph;

namespace {

// Directed graph over n stations with the given keyed edges.
TripGraph make_graph(int n, Granularity g,
                     const std::vector<std::tuple<int, int, int, std::uint64_t>>& edges,
                     int fixed_prefix = 0) {
  TripGraph out;
  out.granularity = g;
  char buf[16];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "N%03d", i);
    out.node_ids.emplace_back(buf);
    out.node_is_fixed.push_back(i < fixed_prefix);
  }
  for (const auto& [src, dst, bucket, w] : edges) {
    out.edges[{static_cast<std::uint32_t>(src), static_cast<std::uint32_t>(dst), bucket}] = w;
    out.total_trips += w;
  }
  return out;
}

bss::community::Partition make_partition(std::vector<int> assignment) {
  bss::community::Partition p;
  p.assignment = std::move(assignment);
  return p;
}

}  // namespace

TEST_CASE("single community swallows all trips") {
  const TripGraph g = make_graph(3, Granularity::kNull,
                                 {{0, 1, -1, 5}, {1, 2, -1, 3}, {2, 2, -1, 2}}, 2);
  const auto stats = community_stats(make_partition({0, 0, 0}), g);
  REQUIRE(stats.size() == 1);
  CHECK(stats[0].within == 10);
  CHECK(stats[0].out == 0);
  CHECK(stats[0].in == 0);
  CHECK(stats[0].old_stations == 2);
  CHECK(stats[0].new_stations == 1);
  CHECK(self_containment(stats) == 1.0);
}

TEST_CASE("community stats match a per-trip classification oracle") {
  bss::Rng rng(19);
  for (int instance = 0; instance < 5; ++instance) {
    const int n = 20;
    std::vector<int> assignment(n);
    for (auto& a : assignment) a = static_cast<int>(rng.bounded(4));
    std::map<int, int> dense;
    for (auto& a : assignment) a = dense.emplace(a, static_cast<int>(dense.size())).first->second;

    // Random directed trip list; the graph aggregates it.
    std::vector<std::pair<int, int>> trips;
    std::vector<std::tuple<int, int, int, std::uint64_t>> edges;
    std::map<std::pair<int, int>, std::uint64_t> weight;
    for (int t = 0; t < 300; ++t) {
      const int src = static_cast<int>(rng.bounded(n));
      const int dst = static_cast<int>(rng.bounded(n));
      trips.emplace_back(src, dst);
      ++weight[{src, dst}];
    }
    for (const auto& [key, w] : weight) edges.push_back({key.first, key.second, -1, w});
    const TripGraph g = make_graph(n, Granularity::kNull, edges, 10);

    const auto stats = community_stats(make_partition(std::vector<int>(assignment)), g);

    // Oracle: classify every trip independently.
    std::map<int, std::uint64_t> within, out, in;
    for (const auto& [src, dst] : trips) {
      if (assignment[src] == assignment[dst]) {
        ++within[assignment[src]];
      } else {
        ++out[assignment[src]];
        ++in[assignment[dst]];
      }
    }
    for (const auto& s : stats) {
      CHECK(s.within == within[s.community_id]);
      CHECK(s.out == out[s.community_id]);
      CHECK(s.in == in[s.community_id]);
      CHECK(s.total() == s.within + s.out + s.in);
    }

    // Global identities: sum(out) = sum(in); within + out sums to total trips.
    std::uint64_t sum_within = 0, sum_out = 0, sum_in = 0;
    for (const auto& s : stats) {
      sum_within += s.within;
      sum_out += s.out;
      sum_in += s.in;
    }
    CHECK(sum_out == sum_in);
    CHECK(sum_within + sum_out == trips.size());
  }
}

TEST_CASE("self containment requires trips") {
  const std::vector<CommunityStats> empty;
  CHECK_THROWS_AS(self_containment(empty), bss::DataError);
  std::vector<CommunityStats> zero(1);
  CHECK_THROWS_AS(self_containment(zero), bss::DataError);
}

TEST_CASE("temporal profiles normalize per community") {
  // Community 0: all trips start on Monday. Community 1: spread.
  const TripGraph g = make_graph(4, Granularity::kDay,
                                 {{0, 1, 0, 6}, {1, 0, 0, 2}, {2, 3, 2, 3}, {3, 2, 5, 1}}, 2);
  const auto profiles = temporal_profiles(make_partition({0, 0, 1, 1}), g);
  REQUIRE(profiles.size() == 2);
  CHECK(profiles[0].shares[0] == 1.0);
  for (int b = 1; b < 7; ++b) CHECK(profiles[0].shares[b] == 0.0);
  CHECK(profiles[1].shares[2] == doctest::Approx(0.75));
  CHECK(profiles[1].shares[5] == doctest::Approx(0.25));
  for (const auto& p : profiles) {
    double sum = 0;
    for (const double s : p.shares) sum += s;
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
  CHECK_THROWS_AS(
      temporal_profiles(make_partition({0, 0, 1, 1}),
                        make_graph(4, Granularity::kNull, {{0, 1, -1, 2}})),
      bss::DataError);
}

TEST_CASE("origin class stats mirror the selected-graph table layout") {
  const TripGraph g = make_graph(4, Granularity::kNull,
                                 {{0, 1, -1, 10},   // fixed -> fixed
                                  {0, 2, -1, 4},    // fixed -> selected
                                  {2, 0, -1, 3},    // selected -> fixed
                                  {2, 3, -1, 5},    // selected -> selected
                                  {3, 3, -1, 2}},   // selected loop
                                 2);
  const auto rows = origin_class_stats(g);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].origin_class == "pre_existing");
  CHECK(rows[0].stations == 2);
  CHECK(rows[0].trips_from == 14);
  CHECK(rows[0].trips_to == 13);
  CHECK(rows[1].origin_class == "selected");
  CHECK(rows[1].trips_from == 10);
  CHECK(rows[1].trips_to == 11);
  CHECK(rows[2].origin_class == "total");
  CHECK(rows[2].trips_from == 24);
  CHECK(rows[2].trips_to == 24);
  CHECK(rows[2].edges_from == 5);
  CHECK(rows[2].edges_to == 5);
}

TEST_CASE("geojson export is lon-first and round-trips ids") {
  const std::map<std::string, int> empty_communities;
  const std::map<std::string, std::uint64_t> empty_degrees;
  const auto empty_doc =
      nlohmann::json::parse(export_geojson({}, empty_communities, empty_degrees));
  CHECK(empty_doc["type"] == "FeatureCollection");
  CHECK(empty_doc["features"].is_array());
  CHECK(empty_doc["features"].empty());

  const std::vector<bss::select::Station> stations{
      {"S1", {53.3, -6.2}, bss::select::Station::Origin::kFixed},
      {"C000001", {53.31, -6.21}, bss::select::Station::Origin::kSelected},
  };
  const std::map<std::string, int> communities{{"S1", 0}, {"C000001", 1}};
  const std::map<std::string, std::uint64_t> degrees{{"S1", 12}, {"C000001", 7}};
  const auto doc = nlohmann::json::parse(export_geojson(stations, communities, degrees));
  REQUIRE(doc["features"].size() == 2);

  std::set<std::string> ids;
  std::set<int> comm_ids;
  for (const auto& f : doc["features"]) {
    ids.insert(f["properties"]["station_id"].get<std::string>());
    comm_ids.insert(f["properties"]["community_id"].get<int>());
    CHECK(f["geometry"]["type"] == "Point");
  }
  CHECK(ids == std::set<std::string>{"S1", "C000001"});
  CHECK(comm_ids == std::set<int>{0, 1});

  // Lon-first coordinate order; features follow the input span.
  const auto& coords = doc["features"][0]["geometry"]["coordinates"];
  CHECK(coords[0].get<double>() == -6.2);
  CHECK(coords[1].get<double>() == 53.3);
}
