#include "bss/geo.hpp"

#include <fstream>

#include <json.hpp>

#include "bss/errors.hpp"

namespace bss::geo {

bool is_valid(GeoPoint p) {
  return std::isfinite(p.lat) && std::isfinite(p.lon) && p.lat >= -90.0 &&
         p.lat <= 90.0 && p.lon >= -180.0 && p.lon <= 180.0;
}

Meters haversine_distance(GeoPoint a, GeoPoint b) {
  if (a == b) return Meters{0.0};
  return Meters{detail::haversine_rad(detail::to_rad_point(a), detail::to_rad_point(b))};
}

GeoPoint centroid(std::span<const GeoPoint> points) {
  if (points.empty()) throw DataError("empty point set");
  double lat = 0.0, lon = 0.0;
  for (const auto& p : points) {
    lat += p.lat;
    lon += p.lon;
  }
  const double n = static_cast<double>(points.size());
  return GeoPoint{lat / n, lon / n};
}

void validate_region(const BoundingRegion& region) {
  if (!(region.min_lat < region.max_lat) || !(region.min_lon < region.max_lon)) {
    throw ConfigError("invalid region: min bound must be below max bound");
  }
  if (!region.land_polygon.empty()) {
    const auto& ring = region.land_polygon;
    if (ring.size() < 4) {
      throw ConfigError("invalid land polygon: ring needs at least 4 vertices");
    }
    if (!(ring.front() == ring.back())) {
      throw ConfigError("invalid land polygon: ring is not closed");
    }
  }
}

namespace {

// Point on segment [a, b] in the (lon, lat) plane, exact arithmetic on the
// stored doubles.
bool on_segment(GeoPoint a, GeoPoint b, GeoPoint p) {
  const double cross =
      (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
  if (cross != 0.0) return false;
  return p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) &&
         p.lat >= std::min(a.lat, b.lat) && p.lat <= std::max(a.lat, b.lat);
}

// Even-odd ray casting with a horizontal ray towards +lon.
bool point_in_ring(const std::vector<GeoPoint>& ring, GeoPoint p) {
  bool inside = false;
  for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
    const GeoPoint& a = ring[j];
    const GeoPoint& b = ring[i];
    if (on_segment(a, b, p)) return true;
    const bool crosses = (a.lat > p.lat) != (b.lat > p.lat);
    if (crosses) {
      const double x_at =
          a.lon + (p.lat - a.lat) / (b.lat - a.lat) * (b.lon - a.lon);
      if (p.lon < x_at) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

bool contains(const BoundingRegion& region, GeoPoint p) {
  if (p.lat < region.min_lat || p.lat > region.max_lat || p.lon < region.min_lon ||
      p.lon > region.max_lon) {
    return false;
  }
  if (region.land_polygon.empty()) return true;
  return point_in_ring(region.land_polygon, p);
}

std::vector<GeoPoint> load_land_polygon_geojson(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open land polygon file: " + path);
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("invalid GeoJSON in " + path + ": " + e.what());
  }
  // Accept either a bare Polygon geometry or a Feature wrapping one.
  if (doc.value("type", "") == "Feature") doc = doc.at("geometry");
  if (doc.value("type", "") != "Polygon") {
    throw DataError("land polygon file must contain a GeoJSON Polygon: " + path);
  }
  const auto& rings = doc.at("coordinates");
  if (!rings.is_array() || rings.empty()) {
    throw DataError("GeoJSON Polygon has no rings: " + path);
  }
  std::vector<GeoPoint> ring;
  for (const auto& coord : rings[0]) {
    if (!coord.is_array() || coord.size() < 2) {
      throw DataError("GeoJSON Polygon has a malformed coordinate: " + path);
    }
    // GeoJSON order is [lon, lat].
    ring.push_back(GeoPoint{coord[1].get<double>(), coord[0].get<double>()});
  }
  if (ring.size() < 4 || !(ring.front() == ring.back())) {
    throw DataError("GeoJSON Polygon outer ring must be closed with >= 4 vertices: " + path);
  }
  return ring;
}

}  // namespace bss::geo
