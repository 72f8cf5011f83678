#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bss/geo.hpp"
#include "bss/ingest.hpp"

namespace bss::synth {

// Layout and demand model for the generated dataset: fixed stations plus
// station-free hotspots, grouped into planted spatial communities with
// per-community temporal profiles.
struct SynthConfig {
  geo::BoundingRegion region{53.2, 53.5, -6.5, -6.0, {}};
  int fixed_stations = 92;
  int hotspots = 24;
  int communities = 4;
  std::uint64_t trips = 62000;

  double crossing_probability = 0.05;   // trip ends in a different community
  double station_endpoint_share = 0.887;  // endpoint exactly at a station
  double near_station_share = 0.02;       // endpoint jittered close to a station
  double jitter_meters = 40.0;             // hotspot endpoint jitter (disk radius)
  double near_station_jitter_meters = 45.0;

  double station_spacing_meters = 300.0;
  double hotspot_spacing_meters = 320.0;
  double margin_fraction = 0.08;  // placement margin inside the region box

  // Cycled over communities: "commuter" (weekday, 8h/17h peaks) or
  // "leisure" (weekend, midday peak).
  std::vector<std::string> profile_mix = {"commuter", "leisure"};

  std::string start_date = "2020-01-06";  // a Monday
  int weeks = 86;
  int min_duration_seconds = 300;
  int max_duration_seconds = 2400;
};

void validate(const SynthConfig& cfg);

struct TruthRow {
  std::string location_id;
  int community_id = 0;
  std::string anchor_id;  // station or hotspot the location was placed around
};

struct SynthOutput {
  std::vector<ingest::Location> locations;
  std::vector<ingest::Rental> rentals;
  std::vector<TruthRow> truth;
  std::vector<geo::GeoPoint> hotspot_points;    // H001.. in order
  std::vector<int> hotspot_community;
  std::vector<int> station_community;           // S001.. in order
};

// Fully determined by (cfg, seed). Throws ConfigError when the layout cannot
// be placed inside the region at the configured spacings.
SynthOutput generate(const SynthConfig& cfg, std::uint64_t seed);

}  // namespace bss::synth
