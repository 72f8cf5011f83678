#include "bss/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <limits>

#include "bss/errors.hpp"
#include "bss/rng.hpp"
#include "bss/timeutil.hpp"

namespace bss::synth {

namespace {

constexpr std::array<double, 7> kCommuterDay = {0.18, 0.18, 0.18, 0.18, 0.18, 0.05, 0.05};
constexpr std::array<double, 7> kLeisureDay = {0.08, 0.08, 0.08, 0.08, 0.08, 0.30, 0.30};

constexpr std::array<double, 24> kCommuterHour = {
    0.002, 0.002, 0.002, 0.002, 0.002, 0.002, 0.02, 0.07, 0.22, 0.07, 0.03, 0.03,
    0.04,  0.03,  0.03,  0.04,  0.08,  0.22,  0.06, 0.02, 0.01, 0.008, 0.005, 0.005};
constexpr std::array<double, 24> kLeisureHour = {
    0.003, 0.003, 0.003, 0.003, 0.003, 0.003, 0.003, 0.003, 0.01,  0.03,  0.06,  0.10,
    0.14,  0.15,  0.14,  0.11,  0.08,  0.05,  0.04,  0.03,  0.02,  0.008, 0.005, 0.003};

template <std::size_t N>
int sample_categorical(const std::array<double, N>& weights, Rng& rng) {
  double total = 0.0;
  for (const double w : weights) total += w;
  double x = rng.uniform01() * total;
  for (std::size_t i = 0; i < N; ++i) {
    x -= weights[i];
    if (x < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(N - 1);
}

int sample_weighted(const std::vector<double>& weights, double total, Rng& rng) {
  double x = rng.uniform01() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    x -= weights[i];
    if (x < 0.0) return static_cast<int>(i);
  }
  return static_cast<int>(weights.size() - 1);
}

struct MeterScale {
  double lat_per_meter;
  double lon_per_meter;
};

MeterScale scale_at(double lat_degrees) {
  const double lat = lat_degrees * geo::kPi / 180.0;
  const double per_meter = 180.0 / (geo::kPi * geo::kEarthRadius);
  return {per_meter, per_meter / std::max(std::cos(lat), 0.01)};
}

}  // namespace

void validate(const SynthConfig& cfg) {
  geo::validate_region(cfg.region);
  if (cfg.fixed_stations < 1) throw ConfigError("synth: need at least one fixed station");
  if (cfg.hotspots < 0) throw ConfigError("synth: hotspots must be non-negative");
  if (cfg.communities < 1) throw ConfigError("synth: need at least one community");
  if (cfg.crossing_probability < 0.0 || cfg.crossing_probability > 1.0) {
    throw ConfigError("synth: crossing_probability must be within [0, 1]");
  }
  if (cfg.station_endpoint_share < 0.0 || cfg.near_station_share < 0.0 ||
      cfg.station_endpoint_share + cfg.near_station_share > 1.0) {
    throw ConfigError("synth: endpoint shares must be non-negative and sum to <= 1");
  }
  if (cfg.jitter_meters < 0.0 || cfg.near_station_jitter_meters < 0.0) {
    throw ConfigError("synth: jitter must be non-negative");
  }
  if (cfg.weeks < 1) throw ConfigError("synth: weeks must be positive");
  if (cfg.min_duration_seconds < 0 || cfg.max_duration_seconds < cfg.min_duration_seconds) {
    throw ConfigError("synth: bad trip duration range");
  }
  if (!timeutil::parse_iso8601(cfg.start_date + "T00:00")) {
    throw ConfigError("synth: start_date must be YYYY-MM-DD");
  }
  if (cfg.profile_mix.empty()) throw ConfigError("synth: profile_mix must not be empty");
  for (const auto& p : cfg.profile_mix) {
    if (p != "commuter" && p != "leisure") {
      throw ConfigError("synth: unknown profile '" + p + "' (commuter or leisure)");
    }
  }
}

SynthOutput generate(const SynthConfig& cfg, std::uint64_t seed) {
  validate(cfg);
  Rng rng(seed);

  const double lat_span = cfg.region.max_lat - cfg.region.min_lat;
  const double lon_span = cfg.region.max_lon - cfg.region.min_lon;
  const double lo_lat = cfg.region.min_lat + cfg.margin_fraction * lat_span;
  const double hi_lat = cfg.region.max_lat - cfg.margin_fraction * lat_span;
  const double lo_lon = cfg.region.min_lon + cfg.margin_fraction * lon_span;
  const double hi_lon = cfg.region.max_lon - cfg.margin_fraction * lon_span;
  const MeterScale scale = scale_at((lo_lat + hi_lat) / 2.0);

  auto place_separated = [&](std::vector<geo::GeoPoint>& accepted, int count,
                             const std::vector<geo::GeoPoint>& avoid, double spacing,
                             const char* what) {
    const int max_attempts = count * 1000 + 1000;
    int attempts = 0;
    while (static_cast<int>(accepted.size()) < count) {
      if (++attempts > max_attempts) {
        throw ConfigError(std::string("synth: infeasible layout, cannot place ") + what +
                          " at the configured spacing inside the region");
      }
      const geo::GeoPoint p{rng.uniform(lo_lat, hi_lat), rng.uniform(lo_lon, hi_lon)};
      bool ok = true;
      for (const auto& q : accepted) {
        if (geo::haversine_distance(p, q).value < spacing) {
          ok = false;
          break;
        }
      }
      for (const auto& q : avoid) {
        if (!ok) break;
        if (geo::haversine_distance(p, q).value < spacing) ok = false;
      }
      if (ok) accepted.push_back(p);
    }
  };

  std::vector<geo::GeoPoint> stations;
  place_separated(stations, cfg.fixed_stations, {}, cfg.station_spacing_meters,
                  "fixed stations");
  std::vector<geo::GeoPoint> hotspots;
  place_separated(hotspots, cfg.hotspots, stations, cfg.hotspot_spacing_meters, "hotspots");

  // Planted communities = nearest sector center on a grid over the core box.
  const int grid = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(cfg.communities))));
  std::vector<geo::GeoPoint> sector_centers;
  for (int c = 0; c < cfg.communities; ++c) {
    const int row = c / grid;
    const int col = c % grid;
    sector_centers.push_back(
        {lo_lat + (hi_lat - lo_lat) * (row + 0.5) / grid,
         lo_lon + (hi_lon - lo_lon) * (col + 0.5) / grid});
  }
  auto community_of = [&](const geo::GeoPoint& p) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < sector_centers.size(); ++c) {
      const double d = geo::haversine_distance(p, sector_centers[c]).value;
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    return best;
  };

  SynthOutput out;
  out.hotspot_points = hotspots;
  out.station_community.reserve(stations.size());
  for (const auto& p : stations) out.station_community.push_back(community_of(p));
  out.hotspot_community.reserve(hotspots.size());
  for (const auto& p : hotspots) out.hotspot_community.push_back(community_of(p));

  // Heavy-tailed station popularity; the weakest stations keep the degree
  // threshold low enough for hotspots to clear Rule 3.
  std::vector<double> station_weight(stations.size());
  for (std::size_t s = 0; s < stations.size(); ++s) {
    station_weight[s] = 1.0 / static_cast<double>(s + 1);
  }

  std::vector<std::vector<int>> community_stations(cfg.communities);
  std::vector<std::vector<int>> community_hotspots(cfg.communities);
  for (std::size_t s = 0; s < stations.size(); ++s) {
    community_stations[out.station_community[s]].push_back(static_cast<int>(s));
  }
  for (std::size_t h = 0; h < hotspots.size(); ++h) {
    community_hotspots[out.hotspot_community[h]].push_back(static_cast<int>(h));
  }
  std::vector<double> community_mass(cfg.communities, 0.0);
  std::vector<std::vector<double>> community_station_weights(cfg.communities);
  for (int c = 0; c < cfg.communities; ++c) {
    for (const int s : community_stations[c]) {
      community_station_weights[c].push_back(station_weight[s]);
      community_mass[c] += station_weight[s];
    }
    if (community_stations[c].empty()) {
      throw ConfigError("synth: community " + std::to_string(c) +
                        " received no stations; reduce communities or add stations");
    }
  }
  double total_mass = 0.0;
  for (const double m : community_mass) total_mass += m;

  char buf[32];
  std::vector<std::string> station_ids;
  for (std::size_t s = 0; s < stations.size(); ++s) {
    std::snprintf(buf, sizeof(buf), "S%03zu", s + 1);
    station_ids.emplace_back(buf);
    ingest::Location loc;
    loc.location_id = station_ids.back();
    loc.point = stations[s];
    loc.is_fixed_station = true;
    std::snprintf(buf, sizeof(buf), "Station %03zu", s + 1);
    loc.station_name = buf;
    out.locations.push_back(std::move(loc));
    out.truth.push_back({station_ids.back(), out.station_community[s], station_ids.back()});
  }
  std::vector<std::string> hotspot_ids;
  for (std::size_t h = 0; h < hotspots.size(); ++h) {
    std::snprintf(buf, sizeof(buf), "H%03zu", h + 1);
    hotspot_ids.emplace_back(buf);
  }

  auto jitter = [&](const geo::GeoPoint& anchor, double radius) {
    const double angle = rng.uniform01() * 2.0 * geo::kPi;
    const double r = radius * std::sqrt(rng.uniform01());
    return geo::GeoPoint{anchor.lat + r * std::cos(angle) * scale.lat_per_meter,
                         anchor.lon + r * std::sin(angle) * scale.lon_per_meter};
  };

  std::uint64_t location_seq = 0;
  auto new_location = [&](const geo::GeoPoint& p, int community,
                          const std::string& anchor) -> std::string {
    std::snprintf(buf, sizeof(buf), "L%07llu", static_cast<unsigned long long>(++location_seq));
    ingest::Location loc;
    loc.location_id = buf;
    loc.point = p;
    out.locations.push_back(std::move(loc));
    out.truth.push_back({out.locations.back().location_id, community, anchor});
    return out.locations.back().location_id;
  };

  auto endpoint_in = [&](int community) -> std::string {
    const double r = rng.uniform01();
    const bool hotspot_possible = !community_hotspots[community].empty();
    if (r < cfg.station_endpoint_share || !hotspot_possible) {
      const int pick = sample_weighted(community_station_weights[community],
                                       community_mass[community], rng);
      return station_ids[community_stations[community][pick]];
    }
    if (r < cfg.station_endpoint_share + cfg.near_station_share) {
      const int pick = sample_weighted(community_station_weights[community],
                                       community_mass[community], rng);
      const int s = community_stations[community][pick];
      return new_location(jitter(stations[s], cfg.near_station_jitter_meters), community,
                          station_ids[s]);
    }
    const auto& hs = community_hotspots[community];
    const int h = hs[rng.bounded(hs.size())];
    return new_location(jitter(hotspots[h], cfg.jitter_meters), community, hotspot_ids[h]);
  };

  const auto origin_day = *timeutil::parse_iso8601(cfg.start_date + "T00:00");

  for (std::uint64_t t = 0; t < cfg.trips; ++t) {
    const int c_from = sample_weighted(community_mass, total_mass, rng);
    int c_to = c_from;
    if (cfg.communities > 1 && rng.uniform01() < cfg.crossing_probability) {
      // renormalize over the remaining communities
      double rest = total_mass - community_mass[c_from];
      double x = rng.uniform01() * rest;
      for (int c = 0; c < cfg.communities; ++c) {
        if (c == c_from) continue;
        x -= community_mass[c];
        if (x < 0.0) {
          c_to = c;
          break;
        }
      }
      if (c_to == c_from) c_to = (c_from + 1) % cfg.communities;
    }

    const bool commuter =
        cfg.profile_mix[c_from % cfg.profile_mix.size()] == "commuter";
    const int week = static_cast<int>(rng.bounded(cfg.weeks));
    const int day = sample_categorical(commuter ? kCommuterDay : kLeisureDay, rng);
    const int hour = sample_categorical(commuter ? kCommuterHour : kLeisureHour, rng);
    const int minute = static_cast<int>(rng.bounded(60));
    const int second = static_cast<int>(rng.bounded(60));
    const std::int64_t start = origin_day.seconds +
                               (static_cast<std::int64_t>(week) * 7 + day) * 86400 +
                               hour * 3600 + minute * 60 + second;
    const std::int64_t duration =
        cfg.min_duration_seconds +
        static_cast<std::int64_t>(
            rng.bounded(cfg.max_duration_seconds - cfg.min_duration_seconds + 1));

    ingest::Rental rental;
    std::snprintf(buf, sizeof(buf), "R%07llu", static_cast<unsigned long long>(t + 1));
    rental.rental_id = buf;
    rental.start_time = {start};
    rental.end_time = {start + duration};
    rental.rental_location_id = endpoint_in(c_from);
    rental.return_location_id = endpoint_in(c_to);
    out.rentals.push_back(std::move(rental));
  }

  return out;
}

}  // namespace bss::synth
