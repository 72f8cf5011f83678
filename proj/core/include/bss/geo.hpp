#pragma once

#include <cmath>
#include <compare>
#include <span>
#include <string>
#include <vector>

namespace bss::geo {

// Mean Earth radius, meters.
inline constexpr double kEarthRadius = 6'371'000.0;

inline constexpr double kPi = 3.14159265358979323846;

// Latitude/longitude in degrees.
struct GeoPoint {
  double lat = 0.0;  // [-90, 90]
  double lon = 0.0;  // [-180, 180]

  friend constexpr bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

bool is_valid(GeoPoint p);

// Non-negative great-circle distance.
struct Meters {
  double value = 0.0;

  friend constexpr auto operator<=>(const Meters&, const Meters&) = default;
};

inline constexpr Meters meters(double v) { return Meters{v}; }

namespace detail {

// Precomputed radian form, for distance-heavy inner loops. Both the public
// function and callers that cache RadPoints go through the same kernel, so
// results are bit-identical either way.
struct RadPoint {
  double phi = 0.0;
  double lambda = 0.0;
  double cos_phi = 1.0;
};

inline RadPoint to_rad_point(GeoPoint p) {
  const double phi = p.lat * (kPi / 180.0);
  const double lambda = p.lon * (kPi / 180.0);
  return RadPoint{phi, lambda, std::cos(phi)};
}

inline double haversine_rad(const RadPoint& a, const RadPoint& b) {
  const double sp = std::sin((a.phi - b.phi) / 2.0);
  const double sl = std::sin((a.lambda - b.lambda) / 2.0);
  double h = sp * sp + a.cos_phi * b.cos_phi * (sl * sl);
  // Floating-point overshoot near antipodal points.
  if (h > 1.0) h = 1.0;
  if (h < 0.0) h = 0.0;
  return 2.0 * kEarthRadius * std::asin(std::sqrt(h));
}

}  // namespace detail

Meters haversine_distance(GeoPoint a, GeoPoint b);

// Arithmetic mean of latitudes and longitudes. Valid at city scale; throws
// DataError("empty point set") on empty input.
GeoPoint centroid(std::span<const GeoPoint> points);

// Lat/lon box with an optional land polygon (closed outer ring).
struct BoundingRegion {
  double min_lat = -90.0;
  double max_lat = 90.0;
  double min_lon = -180.0;
  double max_lon = 180.0;
  std::vector<GeoPoint> land_polygon;  // empty = no polygon filter
};

// Throws ConfigError when the box is inverted or the polygon is not a closed
// ring of >= 4 vertices.
void validate_region(const BoundingRegion& region);

// True iff p is inside the box and, when a polygon is present, inside it by
// even-odd ray casting. Boundary points count as inside.
bool contains(const BoundingRegion& region, GeoPoint p);

// Outer ring of an RFC 7946 GeoJSON Polygon (coordinates are [lon, lat]).
std::vector<GeoPoint> load_land_polygon_geojson(const std::string& path);

}  // namespace bss::geo
