#include "bss/geo.hpp"

#include <cmath>

#include <doctest.h>

#include "bss/errors.hpp"
#include "bss/rng.hpp"
#include "support/oracles.hpp"

using bss::geo::BoundingRegion;
using bss::geo::GeoPoint;
using bss::geo::haversine_distance;
using bss::geo::kEarthRadius;

namespace {

GeoPoint random_point(bss::Rng& rng, double min_lat = -90, double max_lat = 90,
                      double min_lon = -180, double max_lon = 180) {
  return {rng.uniform(min_lat, max_lat), rng.uniform(min_lon, max_lon)};
}

}  // namespace

TEST_CASE("haversine identity and exact known values") {
  const GeoPoint dublin{53.35, -6.26};
  CHECK(haversine_distance(dublin, dublin).value == 0.0);

  // Antipodal equator points: half the circumference.
  const double half_circumference = bss::geo::kPi * kEarthRadius;
  const double d = haversine_distance({0, 0}, {0, 180}).value;
  CHECK(std::abs(d - half_circumference) <= 1e-9 * half_circumference);
}

TEST_CASE("haversine agrees with an independent ellipsoidal oracle in Dublin") {
  const GeoPoint a{53.3498, -6.2603};
  const GeoPoint b{53.3384, -6.2488};
  const double ours = haversine_distance(a, b).value;
  const double oracle = oracles::ellipsoidal_distance_m(a, b);
  CHECK(std::abs(ours - oracle) / oracle < 0.005);
  // Value frozen from the same oracle evaluated out-of-band.
  CHECK(oracle == doctest::Approx(1482.004168).epsilon(1e-6));
  CHECK(ours == doctest::Approx(1479.754782).epsilon(1e-9));
}

TEST_CASE("haversine symmetry, positivity and bounds on random pairs") {
  bss::Rng rng(7);
  const double upper = bss::geo::kPi * kEarthRadius;
  for (int i = 0; i < 2000; ++i) {
    const GeoPoint a = random_point(rng);
    const GeoPoint b = random_point(rng);
    const double ab = haversine_distance(a, b).value;
    const double ba = haversine_distance(b, a).value;
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(ab <= upper);
    if (a == b) CHECK(ab == 0.0);
  }
}

TEST_CASE("haversine triangle inequality on random triples") {
  bss::Rng rng(11);
  for (int i = 0; i < 500; ++i) {
    const GeoPoint a = random_point(rng);
    const GeoPoint b = random_point(rng);
    const GeoPoint c = random_point(rng);
    const double ac = haversine_distance(a, c).value;
    const double ab = haversine_distance(a, b).value;
    const double bc = haversine_distance(b, c).value;
    CHECK(ac <= ab + bc + 1e-6);
  }
}

TEST_CASE("centroid basics") {
  CHECK(bss::geo::centroid(std::vector<GeoPoint>{{53.3, -6.2}}) == GeoPoint{53.3, -6.2});

  const std::vector<GeoPoint> pair{{53.30, -6.20}, {53.32, -6.22}};
  const GeoPoint mid = bss::geo::centroid(pair);
  CHECK(mid.lat == doctest::Approx(53.31).epsilon(1e-12));
  CHECK(mid.lon == doctest::Approx(-6.21).epsilon(1e-12));

  CHECK_THROWS_WITH_AS(bss::geo::centroid(std::vector<GeoPoint>{}), "empty point set",
                       bss::DataError);
}

TEST_CASE("centroid equals a direct-summation mean and ignores permutation") {
  bss::Rng rng(3);
  std::vector<GeoPoint> pts;
  for (int i = 0; i < 10; ++i) pts.push_back(random_point(rng, 53.2, 53.5, -6.5, -6.0));

  double lat = 0, lon = 0;
  for (const auto& p : pts) {
    lat += p.lat;
    lon += p.lon;
  }
  const GeoPoint direct{lat / 10, lon / 10};
  const GeoPoint got = bss::geo::centroid(pts);
  CHECK(got.lat == direct.lat);
  CHECK(got.lon == direct.lon);

  std::vector<GeoPoint> shuffled = pts;
  rng.shuffle(shuffled);
  const GeoPoint reshuffled = bss::geo::centroid(shuffled);
  CHECK(reshuffled.lat == doctest::Approx(got.lat).epsilon(1e-12));
  CHECK(reshuffled.lon == doctest::Approx(got.lon).epsilon(1e-12));
}

TEST_CASE("bounding box containment") {
  const BoundingRegion box{53.2, 53.5, -6.5, -6.0, {}};
  CHECK(bss::geo::contains(box, {53.35, -6.26}));
  CHECK_FALSE(bss::geo::contains(box, {52.0, -6.26}));
  CHECK(bss::geo::contains(box, {53.2, -6.5}));  // boundary is inside
}

TEST_CASE("polygon containment by even-odd ray casting") {
  BoundingRegion region{-1, 2, -1, 2, {}};
  region.land_polygon = {{0, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 0}};
  CHECK(bss::geo::contains(region, {0.5, 0.5}));
  CHECK_FALSE(bss::geo::contains(region, {1.5, 0.5}));
  CHECK(bss::geo::contains(region, {0.0, 0.5}));  // on an edge
  CHECK(bss::geo::contains(region, {1.0, 1.0}));  // on a vertex
}

TEST_CASE("region validation") {
  CHECK_THROWS_AS(bss::geo::validate_region({53.5, 53.2, -6.5, -6.0, {}}), bss::ConfigError);
  BoundingRegion open_ring{0, 1, 0, 1, {}};
  open_ring.land_polygon = {{0, 0}, {0, 1}, {1, 1}, {1, 0}};  // not closed
  CHECK_THROWS_AS(bss::geo::validate_region(open_ring), bss::ConfigError);
  open_ring.land_polygon = {{0, 0}, {0, 1}, {0, 0}};  // too short
  CHECK_THROWS_AS(bss::geo::validate_region(open_ring), bss::ConfigError);
}
