#include "bss/graph.hpp"

#include <doctest.h>

#include "bss/errors.hpp"
#include "support/oracles.hpp"

using namespace bss::graph;

namespace {

bss::ingest::Rental rental(const std::string& id, const std::string& from,
                           const std::string& to, const std::string& start) {
  bss::ingest::Rental r;
  r.rental_id = id;
  r.start_time = *bss::timeutil::parse_iso8601(start);
  r.end_time = {r.start_time.seconds + 600};
  r.rental_location_id = from;
  r.return_location_id = to;
  return r;
}

std::vector<bss::select::Station> two_stations() {
  return {{"A", {53.34, -6.27}, bss::select::Station::Origin::kFixed},
          {"B", {53.35, -6.26}, bss::select::Station::Origin::kSelected}};
}

const std::map<std::string, std::string> kIdentity{{"A", "A"}, {"B", "B"}};

}  // namespace

TEST_CASE("bucket_of per granularity") {
  const auto r = rental("R1", "A", "B", "2020-06-01T08:30:00");  // Monday
  CHECK(bucket_of(r, Granularity::kNull) == kNoBucket);
  CHECK(bucket_of(r, Granularity::kDay) == 0);
  CHECK(bucket_of(r, Granularity::kHour) == 8);
  CHECK(bucket_of(rental("R2", "A", "B", "2020-06-01T23:59:00"), Granularity::kHour) == 23);
  CHECK(bucket_of(rental("R3", "A", "B", "2020-06-07T10:00:00"), Granularity::kDay) == 6);
}

TEST_CASE("build_graph aggregates by bucket") {
  const std::vector<bss::ingest::Rental> rentals{
      rental("R1", "A", "B", "2020-06-01T08:10:00"),  // Monday
      rental("R2", "A", "B", "2020-06-01T09:20:00"),  // Monday
      rental("R3", "A", "B", "2020-06-02T09:20:00"),  // Tuesday
  };
  const auto stations = two_stations();

  const TripGraph null_graph = build_graph(rentals, kIdentity, stations, Granularity::kNull);
  REQUIRE(null_graph.edges.size() == 1);
  CHECK(null_graph.edges.begin()->second == 3);
  CHECK(null_graph.total_trips == 3);

  const TripGraph day_graph = build_graph(rentals, kIdentity, stations, Granularity::kDay);
  REQUIRE(day_graph.edges.size() == 2);
  CHECK(day_graph.edges.at({0, 1, 0}) == 2);  // Monday
  CHECK(day_graph.edges.at({0, 1, 1}) == 1);  // Tuesday

  const TripGraph hour_graph = build_graph(rentals, kIdentity, stations, Granularity::kHour);
  CHECK(hour_graph.edges.at({0, 1, 8}) == 1);
  CHECK(hour_graph.edges.at({0, 1, 9}) == 2);
}

TEST_CASE("build_graph errors name the rental with a missing assignment") {
  const std::vector<bss::ingest::Rental> rentals{rental("R9", "A", "Z", "2020-06-01T08:00:00")};
  CHECK_THROWS_WITH_AS(
      build_graph(rentals, kIdentity, two_stations(), Granularity::kNull),
      "rental 'R9': location 'Z' has no station assignment", bss::DataError);
}

TEST_CASE("t_null equals bucket collapse of t_day and t_hour") {
  std::vector<bss::ingest::Rental> rentals;
  const char* starts[] = {"2020-06-01T08:10:00", "2020-06-03T17:40:00", "2020-06-06T12:05:00",
                          "2020-06-06T12:45:00", "2020-06-07T23:59:59"};
  int seq = 0;
  for (const char* s : starts) {
    rentals.push_back(rental("R" + std::to_string(seq++), "A", "B", s));
    rentals.push_back(rental("R" + std::to_string(seq++), "B", "A", s));
    rentals.push_back(rental("R" + std::to_string(seq++), "A", "A", s));
  }
  const auto stations = two_stations();
  const TripGraph null_graph = build_graph(rentals, kIdentity, stations, Granularity::kNull);

  for (const Granularity g : {Granularity::kDay, Granularity::kHour}) {
    const TripGraph bucketed = build_graph(rentals, kIdentity, stations, g);
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> collapsed;
    for (const auto& [key, w] : bucketed.edges) collapsed[{key.src, key.dst}] += w;
    for (const auto& [key, w] : null_graph.edges) {
      CHECK(collapsed.at({key.src, key.dst}) == w);
    }
    CHECK(bucketed.total_trips == null_graph.total_trips);
  }
}

TEST_CASE("aggregate projection sums both directions and conserves weight") {
  std::vector<bss::ingest::Rental> rentals;
  for (int i = 0; i < 7; ++i)
    rentals.push_back(rental("F" + std::to_string(i), "A", "B", "2020-06-01T08:00:00"));
  for (int i = 0; i < 3; ++i)
    rentals.push_back(rental("G" + std::to_string(i), "B", "A", "2020-06-01T09:00:00"));
  for (int i = 0; i < 4; ++i)
    rentals.push_back(rental("H" + std::to_string(i), "A", "A", "2020-06-01T10:00:00"));

  const TripGraph g = build_graph(rentals, kIdentity, two_stations(), Granularity::kNull);
  const UndirectedProjection p = project_for_communities(g, ProjectionStrategy::kAggregate);

  CHECK(p.edges.at({0, 1}) == 10.0);  // 7 + 3
  CHECK(p.edges.at({0, 0}) == 4.0);   // loop preserved, counted once here
  CHECK(p.total_weight() == 14.0);    // equals total rentals
}

TEST_CASE("bucket-similarity multiplier is exactly 2 for identical profiles") {
  // A->B and B->A with the same start hours: both stations see identical
  // per-bucket endpoint counts.
  std::vector<bss::ingest::Rental> rentals{
      rental("R1", "A", "B", "2020-06-01T08:00:00"),
      rental("R2", "B", "A", "2020-06-01T08:30:00"),
      rental("R3", "A", "B", "2020-06-01T17:00:00"),
      rental("R4", "B", "A", "2020-06-01T17:30:00"),
  };
  const TripGraph g = build_graph(rentals, kIdentity, two_stations(), Granularity::kHour);
  const UndirectedProjection aggregate = project_for_communities(g, ProjectionStrategy::kAggregate);
  const UndirectedProjection similar =
      project_for_communities(g, ProjectionStrategy::kBucketSimilarity);
  CHECK(similar.edges.at({0, 1}) == 2.0 * aggregate.edges.at({0, 1}));
}

TEST_CASE("bucket-similarity multiplier stays within [1, 2]") {
  std::vector<bss::ingest::Rental> rentals;
  const char* starts[] = {"2020-06-01T06:00:00", "2020-06-01T08:00:00", "2020-06-01T12:00:00",
                          "2020-06-02T17:00:00", "2020-06-05T20:00:00"};
  int seq = 0;
  for (const char* s : starts) {
    rentals.push_back(rental("R" + std::to_string(seq++), "A", "B", s));
    if (seq % 2 == 0) rentals.push_back(rental("R" + std::to_string(seq++), "B", "A", s));
    rentals.push_back(rental("R" + std::to_string(seq++), "A", "A", s));
  }
  const TripGraph g = build_graph(rentals, kIdentity, two_stations(), Granularity::kHour);
  const auto aggregate = project_for_communities(g, ProjectionStrategy::kAggregate);
  const auto similar = project_for_communities(g, ProjectionStrategy::kBucketSimilarity);
  for (const auto& [key, w] : aggregate.edges) {
    const double multiplier = similar.edges.at(key) / w;
    CHECK(multiplier >= 1.0);
    CHECK(multiplier <= 2.0);
  }
  // Projection symmetry is structural: keys are stored with u <= v.
  for (const auto& [key, w] : similar.edges) CHECK(key.first <= key.second);
}

TEST_CASE("strategy parsing") {
  CHECK(parse_strategy("aggregate") == ProjectionStrategy::kAggregate);
  CHECK(parse_strategy("bucket-similarity") == ProjectionStrategy::kBucketSimilarity);
  CHECK_THROWS_AS(parse_strategy("mystery"), bss::ConfigError);
  CHECK(parse_granularity("t_day") == Granularity::kDay);
  CHECK_THROWS_AS(parse_granularity("t_fortnight"), bss::ConfigError);
}
