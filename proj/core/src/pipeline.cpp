#include "bss/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <unordered_map>

#include "bss/cluster.hpp"
#include "bss/csv.hpp"
#include "bss/errors.hpp"
#include "bss/ingest.hpp"
#include "bss/report.hpp"
#include "bss/select.hpp"

namespace bss::pipeline {

namespace fs = std::filesystem;

namespace {

std::string join(const std::string& dir, const char* name) {
  return (fs::path(dir) / name).string();
}

std::ofstream open_out(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty()) fs::create_directories(parent);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write file: " + path);
  return out;
}

double to_double(const std::string& text, const char* what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string("bad ") + what + " value: '" + text + "'");
  }
}

std::uint64_t to_u64(const std::string& text, const char* what) {
  try {
    std::size_t pos = 0;
    const std::uint64_t v = std::stoull(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string("bad ") + what + " value: '" + text + "'");
  }
}

int to_int(const std::string& text, const char* what) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(text, &pos);
    if (pos != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw DataError(std::string("bad ") + what + " value: '" + text + "'");
  }
}

geo::BoundingRegion effective_region(const PipelineConfig& cfg) {
  geo::BoundingRegion region = cfg.region;
  if (!cfg.land_polygon_path.empty()) {
    region.land_polygon = geo::load_land_polygon_geojson(cfg.land_polygon_path);
  }
  geo::validate_region(region);
  return region;
}

std::string effective_locations_path(const PipelineConfig& cfg) {
  return cfg.synth_enabled ? join(cfg.output_dir, "locations.csv") : cfg.locations_path;
}

std::string effective_rentals_path(const PipelineConfig& cfg) {
  return cfg.synth_enabled ? join(cfg.output_dir, "rentals.csv") : cfg.rentals_path;
}

// ---- artifact writers ----------------------------------------------------

void write_locations(const std::string& path, std::span<const ingest::Location> locations) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"location_id", "latitude", "longitude", "is_fixed_station", "station_name"});
  for (const auto& loc : locations) {
    w.row({loc.location_id,
           loc.has_coordinates ? csv::format_double(loc.point.lat) : "",
           loc.has_coordinates ? csv::format_double(loc.point.lon) : "",
           loc.is_fixed_station ? "true" : "false", loc.station_name});
  }
}

void write_rentals(const std::string& path, std::span<const ingest::Rental> rentals) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"rental_id", "start_time", "end_time", "rental_location_id", "return_location_id"});
  for (const auto& r : rentals) {
    w.row({r.rental_id, timeutil::to_iso8601(r.start_time), timeutil::to_iso8601(r.end_time),
           r.rental_location_id, r.return_location_id});
  }
}

void write_truth(const std::string& path, std::span<const synth::TruthRow> truth) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"location_id", "community_id", "hotspot_id"});
  for (const auto& row : truth) {
    w.row({row.location_id, std::to_string(row.community_id), row.anchor_id});
  }
}

void write_audit(const std::string& path, std::span<const ingest::AuditEntry> audit) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"rule", "rows_removed", "table"});
  for (const auto& entry : audit) {
    w.row({entry.rule, std::to_string(entry.rows_removed), entry.table});
  }
}

void write_clusters(const std::string& path, const cluster::ClusterSet& set) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"cluster_id", "member_location_id", "centroid_lat", "centroid_lon",
         "anchored_station_id"});
  for (const auto& c : set.clusters) {
    for (const auto& member : c.member_location_ids) {
      w.row({c.cluster_id, member, csv::format_double(c.centroid.lat),
             csv::format_double(c.centroid.lon), c.anchored_station_id});
    }
  }
}

void write_stations(const std::string& path, std::span<const select::Station> stations,
                    const std::map<std::string, std::uint64_t>& degree_of) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"station_id", "lat", "lon", "origin", "degree"});
  for (const auto& st : stations) {
    const auto deg = degree_of.find(st.station_id);
    w.row({st.station_id, csv::format_double(st.point.lat), csv::format_double(st.point.lon),
           st.origin == select::Station::Origin::kFixed ? "fixed" : "selected",
           std::to_string(deg == degree_of.end() ? 0 : deg->second)});
  }
}

void write_assignment(const std::string& path,
                      const std::map<std::string, std::string>& assignment) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"location_id", "station_id"});
  for (const auto& [loc, st] : assignment) w.row({loc, st});
}

void write_edges(const std::string& path, std::span<const graph::TripGraph> graphs) {
  auto out = open_out(path);
  csv::Writer w(out);
  w.row({"src", "dst", "bucket", "weight", "granularity"});
  for (const auto& g : graphs) {
    for (const auto& [key, weight] : g.edges) {
      w.row({g.node_ids[key.src], g.node_ids[key.dst],
             key.bucket == graph::kNoBucket ? "" : std::to_string(key.bucket),
             std::to_string(weight), std::string(graph::granularity_name(g.granularity))});
    }
  }
}

// ---- artifact readers ----------------------------------------------------

std::vector<ingest::Location> read_locations_strict(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<ingest::RejectedRow> rejects;
  auto locations = ingest::parse_locations(in, rejects);
  if (!rejects.empty()) {
    throw DataError(path + ": line " + std::to_string(rejects.front().line) + ": " +
                    rejects.front().reason);
  }
  return locations;
}

std::vector<ingest::Rental> read_rentals_strict(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open file: " + path);
  std::vector<ingest::RejectedRow> rejects;
  auto rentals = ingest::parse_rentals(in, rejects);
  if (!rejects.empty()) {
    throw DataError(path + ": line " + std::to_string(rejects.front().line) + ": " +
                    rejects.front().reason);
  }
  return rentals;
}

cluster::ClusterSet read_clusters(const std::string& path) {
  const csv::Table table = csv::read_csv_file(path);
  const int id_col = table.column("cluster_id");
  const int member_col = table.column("member_location_id");
  const int lat_col = table.column("centroid_lat");
  const int lon_col = table.column("centroid_lon");
  const int anchor_col = table.column("anchored_station_id");
  if (id_col < 0 || member_col < 0 || lat_col < 0 || lon_col < 0 || anchor_col < 0) {
    throw DataError(path + ": missing cluster columns");
  }
  cluster::ClusterSet set;
  std::unordered_map<std::string, std::size_t> index;
  for (const auto& row : table.rows) {
    const std::string& id = row.fields[id_col];
    auto [it, inserted] = index.emplace(id, set.clusters.size());
    if (inserted) {
      cluster::Cluster c;
      c.cluster_id = id;
      c.centroid = {to_double(row.fields[lat_col], "centroid_lat"),
                    to_double(row.fields[lon_col], "centroid_lon")};
      c.anchored_station_id = row.fields[anchor_col];
      set.clusters.push_back(std::move(c));
    }
    set.clusters[it->second].member_location_ids.push_back(row.fields[member_col]);
  }
  for (auto& c : set.clusters) {
    std::sort(c.member_location_ids.begin(), c.member_location_ids.end());
    if (c.anchored()) {
      for (const auto& m : c.member_location_ids) {
        if (m != c.anchored_station_id) set.absorbed.emplace_back(m, c.anchored_station_id);
      }
    }
  }
  std::sort(set.absorbed.begin(), set.absorbed.end());
  return set;
}

struct StationTable {
  std::vector<select::Station> stations;  // sorted by id
  std::map<std::string, std::uint64_t> degree_of;
};

StationTable read_stations(const std::string& path) {
  const csv::Table table = csv::read_csv_file(path);
  const int id_col = table.column("station_id");
  const int lat_col = table.column("lat");
  const int lon_col = table.column("lon");
  const int origin_col = table.column("origin");
  const int degree_col = table.column("degree");
  if (id_col < 0 || lat_col < 0 || lon_col < 0 || origin_col < 0 || degree_col < 0) {
    throw DataError(path + ": missing station columns");
  }
  StationTable out;
  for (const auto& row : table.rows) {
    select::Station st;
    st.station_id = row.fields[id_col];
    st.point = {to_double(row.fields[lat_col], "lat"), to_double(row.fields[lon_col], "lon")};
    st.origin = row.fields[origin_col] == "fixed" ? select::Station::Origin::kFixed
                                                  : select::Station::Origin::kSelected;
    out.degree_of[st.station_id] = to_u64(row.fields[degree_col], "degree");
    out.stations.push_back(std::move(st));
  }
  std::sort(out.stations.begin(), out.stations.end(),
            [](const auto& a, const auto& b) { return a.station_id < b.station_id; });
  return out;
}

std::map<std::string, std::string> read_assignment(const std::string& path) {
  const csv::Table table = csv::read_csv_file(path);
  const int loc_col = table.column("location_id");
  const int st_col = table.column("station_id");
  if (loc_col < 0 || st_col < 0) throw DataError(path + ": missing assignment columns");
  std::map<std::string, std::string> out;
  for (const auto& row : table.rows) out[row.fields[loc_col]] = row.fields[st_col];
  return out;
}

// Rebuilds one TripGraph per granularity present in edges.csv.
std::map<graph::Granularity, graph::TripGraph> read_edges(
    const std::string& path, std::span<const select::Station> stations) {
  const csv::Table table = csv::read_csv_file(path);
  const int src_col = table.column("src");
  const int dst_col = table.column("dst");
  const int bucket_col = table.column("bucket");
  const int weight_col = table.column("weight");
  const int gran_col = table.column("granularity");
  if (src_col < 0 || dst_col < 0 || bucket_col < 0 || weight_col < 0 || gran_col < 0) {
    throw DataError(path + ": missing edge columns");
  }

  std::unordered_map<std::string, std::uint32_t> node_index;
  std::vector<std::string> node_ids;
  std::vector<bool> node_is_fixed;
  for (const auto& st : stations) {
    node_index.emplace(st.station_id, static_cast<std::uint32_t>(node_ids.size()));
    node_ids.push_back(st.station_id);
    node_is_fixed.push_back(st.origin == select::Station::Origin::kFixed);
  }

  std::map<graph::Granularity, graph::TripGraph> out;
  for (const auto& row : table.rows) {
    const graph::Granularity g = graph::parse_granularity(row.fields[gran_col]);
    auto [it, inserted] = out.try_emplace(g);
    if (inserted) {
      it->second.granularity = g;
      it->second.node_ids = node_ids;
      it->second.node_is_fixed = node_is_fixed;
    }
    const auto src = node_index.find(row.fields[src_col]);
    const auto dst = node_index.find(row.fields[dst_col]);
    if (src == node_index.end() || dst == node_index.end()) {
      throw DataError(path + ": edge endpoint is not a known station");
    }
    const int bucket =
        row.fields[bucket_col].empty() ? graph::kNoBucket : to_int(row.fields[bucket_col], "bucket");
    const std::uint64_t weight = to_u64(row.fields[weight_col], "weight");
    it->second.edges[{src->second, dst->second, bucket}] += weight;
    it->second.total_trips += weight;
  }
  return out;
}

struct CommunityRun {
  graph::Granularity granularity;
  std::string strategy;
  std::map<std::string, int> community_of;
};

std::vector<CommunityRun> read_communities(const std::string& path) {
  const csv::Table table = csv::read_csv_file(path);
  const int gran_col = table.column("granularity");
  const int strat_col = table.column("strategy");
  const int st_col = table.column("station_id");
  const int comm_col = table.column("community_id");
  if (gran_col < 0 || strat_col < 0 || st_col < 0 || comm_col < 0) {
    throw DataError(path + ": missing community columns");
  }
  std::vector<CommunityRun> runs;
  for (const auto& row : table.rows) {
    const graph::Granularity g = graph::parse_granularity(row.fields[gran_col]);
    CommunityRun* run = nullptr;
    for (auto& r : runs) {
      if (r.granularity == g && r.strategy == row.fields[strat_col]) run = &r;
    }
    if (!run) {
      runs.push_back({g, row.fields[strat_col], {}});
      run = &runs.back();
    }
    run->community_of[row.fields[st_col]] = to_int(row.fields[comm_col], "community_id");
  }
  return runs;
}

}  // namespace

// ---- config ----------------------------------------------------------------

std::vector<GranularityRun> PipelineConfig::default_runs() {
  return {{graph::Granularity::kNull, graph::ProjectionStrategy::kAggregate},
          {graph::Granularity::kDay, graph::ProjectionStrategy::kBucketSimilarity},
          {graph::Granularity::kHour, graph::ProjectionStrategy::kBucketSimilarity}};
}

std::vector<GranularityRun> PipelineConfig::effective_runs() const {
  return runs.empty() ? default_runs() : runs;
}

community::LouvainConfig PipelineConfig::louvain_config() const {
  return {seed, resolution, min_gain, max_passes};
}

void validate(const PipelineConfig& cfg) {
  geo::validate_region(cfg.region);
  if (!(cfg.absorption_radius > 0.0) || !(cfg.cluster_cut > 0.0) || !(cfg.proximity > 0.0)) {
    throw ConfigError("absorption_radius, cluster_cut and proximity must be positive");
  }
  if (cfg.cluster_cut < cfg.absorption_radius) {
    std::cerr << "warning: cluster_cut (" << cfg.cluster_cut << " m) is below "
              << "absorption_radius (" << cfg.absorption_radius << " m)\n";
  }
  community::validate(cfg.louvain_config());
  std::set<graph::Granularity> seen;
  for (const auto& run : cfg.effective_runs()) {
    if (!seen.insert(run.granularity).second) {
      throw ConfigError("granularity listed twice: " +
                        std::string(graph::granularity_name(run.granularity)));
    }
  }
  if (cfg.output_dir.empty()) throw ConfigError("output_dir must not be empty");
}

void StageStats::add(const std::string& measure, const std::string& value) {
  rows.emplace_back(measure, value);
}

void StageStats::add(const std::string& measure, std::uint64_t value) {
  rows.emplace_back(measure, std::to_string(value));
}

// ---- stages ----------------------------------------------------------------

StageStats stage_synth(const PipelineConfig& cfg) {
  synth::SynthConfig synth_cfg = cfg.synth;
  synth_cfg.region = cfg.region;
  const synth::SynthOutput data = synth::generate(synth_cfg, cfg.seed);
  write_locations(join(cfg.output_dir, "locations.csv"), data.locations);
  write_rentals(join(cfg.output_dir, "rentals.csv"), data.rentals);
  write_truth(join(cfg.output_dir, "truth.csv"), data.truth);

  StageStats stats;
  stats.add("synth_locations", data.locations.size());
  stats.add("synth_rentals", data.rentals.size());
  stats.add("synth_hotspots", data.hotspot_points.size());
  return stats;
}

StageStats stage_clean(const PipelineConfig& cfg) {
  const geo::BoundingRegion region = effective_region(cfg);
  std::ifstream loc_in(effective_locations_path(cfg), std::ios::binary);
  if (!loc_in) throw DataError("cannot open file: " + effective_locations_path(cfg));
  std::ifstream rent_in(effective_rentals_path(cfg), std::ios::binary);
  if (!rent_in) throw DataError("cannot open file: " + effective_rentals_path(cfg));

  const ingest::RawTables raw = ingest::parse_tables(rent_in, loc_in);
  std::size_t stations_raw = 0;
  for (const auto& loc : raw.locations) stations_raw += loc.is_fixed_station ? 1 : 0;

  const ingest::CleanedDataset cleaned = ingest::clean(raw, region);
  write_locations(join(cfg.output_dir, "cleaned_locations.csv"), cleaned.locations);
  write_rentals(join(cfg.output_dir, "cleaned_rentals.csv"), cleaned.rentals);
  write_audit(join(cfg.output_dir, "cleaning_audit.csv"), cleaned.audit);

  std::size_t loc_rejects = 0, rent_rejects = 0;
  for (const auto& r : raw.rejects) (r.table == "locations" ? loc_rejects : rent_rejects) += 1;

  StageStats stats;
  stats.add("locations_raw", raw.locations.size() + loc_rejects);
  stats.add("locations_rejected", loc_rejects);
  stats.add("locations_cleaned", cleaned.locations.size());
  stats.add("rentals_raw", raw.rentals.size() + rent_rejects);
  stats.add("rentals_rejected", rent_rejects);
  stats.add("rentals_cleaned", cleaned.rentals.size());
  stats.add("stations_raw", stations_raw);
  stats.add("stations_cleaned", cleaned.fixed_station_ids.size());
  return stats;
}

StageStats stage_cluster(const PipelineConfig& cfg) {
  const auto locations = read_locations_strict(join(cfg.output_dir, "cleaned_locations.csv"));
  const auto rentals = read_rentals_strict(join(cfg.output_dir, "cleaned_rentals.csv"));

  std::vector<cluster::PointRecord> station_points;
  std::vector<cluster::PointRecord> other_points;
  for (const auto& loc : locations) {
    (loc.is_fixed_station ? station_points : other_points)
        .push_back({loc.location_id, loc.point});
  }

  const cluster::Absorption absorption = cluster::absorb_near_stations(
      other_points, station_points, geo::meters(cfg.absorption_radius));
  const auto candidates =
      cluster::hac_complete_linkage(absorption.remaining, geo::meters(cfg.cluster_cut));
  const cluster::ClusterSet set =
      cluster::finalize_clusters(candidates, absorption, station_points, absorption.remaining);
  write_clusters(join(cfg.output_dir, "clusters.csv"), set);

  // Candidate-graph tallies: trips remapped onto clusters.
  std::unordered_map<std::string, std::size_t> cluster_of;
  for (std::size_t i = 0; i < set.clusters.size(); ++i) {
    for (const auto& m : set.clusters[i].member_location_ids) cluster_of.emplace(m, i);
  }
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> directed;
  for (const auto& r : rentals) {
    const auto src = cluster_of.find(r.rental_location_id);
    const auto dst = cluster_of.find(r.return_location_id);
    if (src == cluster_of.end() || dst == cluster_of.end()) {
      throw InvariantError("rental '" + r.rental_id + "' endpoint missing from clusters");
    }
    ++directed[{src->second, dst->second}];
  }
  std::set<std::pair<std::size_t, std::size_t>> undirected;
  std::uint64_t directed_loops = 0;
  for (const auto& [key, unused_w] : directed) {
    undirected.emplace(std::min(key.first, key.second), std::max(key.first, key.second));
    if (key.first == key.second) ++directed_loops;
  }

  StageStats stats;
  stats.add("absorbed_locations", set.absorbed.size());
  stats.add("clusters_total", set.clusters.size());
  stats.add("clusters_anchored", set.clusters.size() - candidates.size());
  stats.add("candidates", candidates.size());
  stats.add("candidate_graph_nodes", set.clusters.size());
  stats.add("candidate_graph_undirected_edges", undirected.size());
  stats.add("candidate_graph_undirected_edges_noloops", undirected.size() - directed_loops);
  stats.add("candidate_graph_directed_edges", directed.size());
  stats.add("candidate_graph_directed_edges_noloops", directed.size() - directed_loops);
  stats.add("candidate_graph_trips", rentals.size());
  return stats;
}

StageStats stage_select(const PipelineConfig& cfg) {
  const auto locations = read_locations_strict(join(cfg.output_dir, "cleaned_locations.csv"));
  const auto rentals = read_rentals_strict(join(cfg.output_dir, "cleaned_rentals.csv"));
  const cluster::ClusterSet set = read_clusters(join(cfg.output_dir, "clusters.csv"));

  const select::EndpointCounts counts = select::count_endpoints(rentals);

  std::vector<select::Candidate> candidates;
  std::vector<select::FixedStationInfo> fixed;
  for (const auto& c : set.clusters) {
    const std::uint64_t degree = select::compute_degree(c.member_location_ids, counts);
    if (c.anchored()) {
      fixed.push_back({c.anchored_station_id, c.centroid, degree});
    } else {
      candidates.push_back({c.cluster_id, c.centroid, degree, 0});
    }
  }

  const select::SelectionResult result =
      select::select_stations(candidates, fixed, geo::meters(cfg.proximity));

  std::vector<cluster::PointRecord> all_points;
  all_points.reserve(locations.size());
  for (const auto& loc : locations) all_points.push_back({loc.location_id, loc.point});
  const select::StationSet stations = select::reassign(set, result.selected, all_points);

  // Post-reassignment endpoint counts per station.
  std::map<std::string, std::uint64_t> degree_of;
  for (const auto& st : stations.stations) degree_of[st.station_id] = 0;
  for (const auto& r : rentals) {
    const auto src = stations.assignment.find(r.rental_location_id);
    const auto dst = stations.assignment.find(r.return_location_id);
    if (src == stations.assignment.end() || dst == stations.assignment.end()) {
      throw InvariantError("rental '" + r.rental_id + "' endpoint left unassigned");
    }
    ++degree_of[src->second];
    ++degree_of[dst->second];
  }
  std::uint64_t degree_sum = 0;
  for (const auto& [unused_id, d] : degree_of) degree_sum += d;
  if (degree_sum != 2 * rentals.size()) {
    throw InvariantError("trip endpoints not conserved by reassignment");
  }

  write_stations(join(cfg.output_dir, "stations.csv"), stations.stations, degree_of);
  write_assignment(join(cfg.output_dir, "assignment.csv"), stations.assignment);

  StageStats stats;
  stats.add("degree_threshold", result.degree_threshold);
  stats.add("selection_passes", static_cast<std::uint64_t>(result.elimination_passes));
  stats.add("stations_selected", result.selected.size());
  stats.add("stations_final", stations.stations.size());
  stats.add("trips_total", rentals.size());
  return stats;
}

StageStats stage_graph(const PipelineConfig& cfg) {
  const auto rentals = read_rentals_strict(join(cfg.output_dir, "cleaned_rentals.csv"));
  const StationTable stations = read_stations(join(cfg.output_dir, "stations.csv"));
  const auto assignment = read_assignment(join(cfg.output_dir, "assignment.csv"));

  // T_Null always ships: the report stage draws whole-period counts from it.
  std::set<graph::Granularity> wanted{graph::Granularity::kNull};
  for (const auto& run : cfg.effective_runs()) wanted.insert(run.granularity);

  std::vector<graph::TripGraph> graphs;
  StageStats stats;
  for (const graph::Granularity g : wanted) {
    graphs.push_back(graph::build_graph(rentals, assignment, stations.stations, g));
    stats.add(std::string("graph_edges_") + std::string(graph::granularity_name(g)),
              graphs.back().edges.size());
  }
  write_edges(join(cfg.output_dir, "edges.csv"), graphs);
  stats.add("graph_trips", rentals.size());
  return stats;
}

StageStats stage_detect(const PipelineConfig& cfg) {
  const StationTable stations = read_stations(join(cfg.output_dir, "stations.csv"));
  const auto graphs = read_edges(join(cfg.output_dir, "edges.csv"), stations.stations);

  const community::LouvainConfig louvain_cfg = cfg.louvain_config();

  std::vector<graph::UndirectedProjection> projections;
  std::vector<community::DetectionInput> inputs;
  const auto runs = cfg.effective_runs();
  projections.reserve(runs.size());
  for (const auto& run : runs) {
    const auto it = graphs.find(run.granularity);
    if (it == graphs.end()) {
      throw DataError("edges.csv has no rows for granularity " +
                      std::string(graph::granularity_name(run.granularity)) +
                      "; rerun the graph stage with it enabled");
    }
    projections.push_back(graph::project_for_communities(it->second, run.strategy));
  }
  for (std::size_t i = 0; i < runs.size(); ++i) {
    inputs.push_back({&projections[i], runs[i].granularity, runs[i].strategy});
  }

  const std::vector<community::Partition> partitions = community::detect_all(inputs, louvain_cfg);

  auto comm_out = open_out(join(cfg.output_dir, "communities.csv"));
  csv::Writer comm_writer(comm_out);
  comm_writer.row({"granularity", "strategy", "station_id", "community_id"});
  auto meta_out = open_out(join(cfg.output_dir, "detect_meta.csv"));
  csv::Writer meta_writer(meta_out);
  meta_writer.row({"granularity", "strategy", "seed", "resolution", "min_gain", "max_passes",
                   "num_communities", "modularity", "passes"});

  StageStats stats;
  for (std::size_t i = 0; i < partitions.size(); ++i) {
    const auto& part = partitions[i];
    const auto& node_ids = projections[i].node_ids;
    const std::string gran(graph::granularity_name(part.granularity));
    for (std::size_t u = 0; u < node_ids.size(); ++u) {
      comm_writer.row({gran, part.strategy, node_ids[u], std::to_string(part.assignment[u])});
    }
    meta_writer.row({gran, part.strategy, std::to_string(louvain_cfg.seed),
                     csv::format_double(louvain_cfg.resolution),
                     csv::format_double(louvain_cfg.min_gain),
                     std::to_string(louvain_cfg.max_passes),
                     std::to_string(part.num_communities()),
                     csv::format_double(part.modularity), std::to_string(part.passes)});
    stats.add("communities_" + gran, static_cast<std::uint64_t>(part.num_communities()));
    stats.add("modularity_" + gran, csv::format_double(part.modularity));
  }
  return stats;
}

StageStats stage_report(const PipelineConfig& cfg) {
  const StationTable stations = read_stations(join(cfg.output_dir, "stations.csv"));
  const auto graphs = read_edges(join(cfg.output_dir, "edges.csv"), stations.stations);
  const auto runs = read_communities(join(cfg.output_dir, "communities.csv"));
  if (runs.empty()) throw DataError("communities.csv holds no detection runs");

  const auto t_null_it = graphs.find(graph::Granularity::kNull);
  if (t_null_it == graphs.end()) {
    throw DataError("edges.csv has no t_null rows; rerun the graph stage");
  }
  const graph::TripGraph& t_null = t_null_it->second;

  auto partition_for = [&](const CommunityRun& run) {
    community::Partition part;
    part.granularity = run.granularity;
    part.strategy = run.strategy;
    part.assignment.reserve(t_null.node_ids.size());
    for (const auto& id : t_null.node_ids) {
      const auto it = run.community_of.find(id);
      if (it == run.community_of.end()) {
        throw DataError("station '" + id + "' missing from communities.csv");
      }
      part.assignment.push_back(it->second);
    }
    return part;
  };

  auto stats_out = open_out(join(cfg.output_dir, "community_stats.csv"));
  csv::Writer stats_writer(stats_out);
  stats_writer.row({"granularity", "strategy", "community_id", "old_stations", "new_stations",
                    "stations_total", "within", "out", "in", "trips_total"});
  auto profile_out = open_out(join(cfg.output_dir, "temporal_profiles.csv"));
  csv::Writer profile_writer(profile_out);
  profile_writer.row({"granularity", "strategy", "community_id", "bucket", "share"});

  StageStats stage_stats;
  for (const auto& run : runs) {
    const community::Partition part = partition_for(run);
    const std::string gran(graph::granularity_name(run.granularity));

    const auto comm_stats = report::community_stats(part, t_null);
    for (const auto& s : comm_stats) {
      stats_writer.row({gran, run.strategy, std::to_string(s.community_id),
                        std::to_string(s.old_stations), std::to_string(s.new_stations),
                        std::to_string(s.stations()), std::to_string(s.within),
                        std::to_string(s.out), std::to_string(s.in),
                        std::to_string(s.total())});
    }
    stage_stats.add("self_containment_" + gran,
                    csv::format_double(report::self_containment(comm_stats)));

    if (run.granularity != graph::Granularity::kNull) {
      const auto bucketed = graphs.find(run.granularity);
      if (bucketed == graphs.end()) {
        throw DataError("edges.csv has no rows for granularity " + gran);
      }
      for (const auto& profile : report::temporal_profiles(part, bucketed->second)) {
        for (std::size_t b = 0; b < profile.shares.size(); ++b) {
          profile_writer.row({gran, run.strategy, std::to_string(profile.community_id),
                              std::to_string(b), csv::format_double(profile.shares[b])});
        }
      }
    }
  }

  auto class_out = open_out(join(cfg.output_dir, "station_class_stats.csv"));
  csv::Writer class_writer(class_out);
  class_writer.row({"origin_class", "stations", "trips_from", "trips_to", "edges_from",
                    "edges_to"});
  for (const auto& row : report::origin_class_stats(t_null)) {
    class_writer.row({row.origin_class, std::to_string(row.stations),
                      std::to_string(row.trips_from), std::to_string(row.trips_to),
                      std::to_string(row.edges_from), std::to_string(row.edges_to)});
  }

  // Map colouring follows the t_null partition when present.
  const CommunityRun* geo_run = &runs.front();
  for (const auto& run : runs) {
    if (run.granularity == graph::Granularity::kNull) geo_run = &run;
  }
  const std::string geojson =
      report::export_geojson(stations.stations, geo_run->community_of, stations.degree_of);
  auto geo_out = open_out(join(cfg.output_dir, "stations.geojson"));
  geo_out << geojson;

  stage_stats.add("report_runs", runs.size());
  return stage_stats;
}

StageStats run_pipeline(const PipelineConfig& cfg) {
  validate(cfg);

  StageStats summary;
  auto run_stage = [&](const char* name, StageStats (*stage)(const PipelineConfig&)) {
    try {
      const StageStats stats = stage(cfg);
      summary.rows.insert(summary.rows.end(), stats.rows.begin(), stats.rows.end());
    } catch (const ConfigError& e) {
      throw ConfigError(std::string("stage ") + name + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(std::string("stage ") + name + ": " + e.what());
    } catch (const InvariantError& e) {
      throw InvariantError(std::string("stage ") + name + ": " + e.what());
    }
  };

  if (cfg.synth_enabled) run_stage("synth", stage_synth);
  run_stage("clean", stage_clean);
  run_stage("cluster", stage_cluster);
  run_stage("select", stage_select);
  run_stage("graph", stage_graph);
  run_stage("detect", stage_detect);
  run_stage("report", stage_report);

  summary.add("seed", cfg.seed);
  summary.add("edge_definition", "aggregated_directed");

  auto out = open_out(join(cfg.output_dir, "run_summary.csv"));
  csv::Writer w(out);
  w.row({"measure", "value"});
  for (const auto& [measure, value] : summary.rows) w.row({measure, value});
  return summary;
}

}  // namespace bss::pipeline
