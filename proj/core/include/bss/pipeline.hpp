#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bss/community.hpp"
#include "bss/geo.hpp"
#include "bss/graph.hpp"
#include "bss/synth.hpp"

namespace bss::pipeline {

struct GranularityRun {
  graph::Granularity granularity = graph::Granularity::kNull;
  graph::ProjectionStrategy strategy = graph::ProjectionStrategy::kAggregate;
};

struct PipelineConfig {
  geo::BoundingRegion region{53.2, 53.5, -6.5, -6.0, {}};
  std::string land_polygon_path;  // optional GeoJSON Polygon
  std::string timezone = "Europe/Dublin";  // metadata; timestamps stay wall-clock

  double absorption_radius = 50.0;  // meters
  double cluster_cut = 100.0;
  double proximity = 250.0;

  std::vector<GranularityRun> runs;  // empty = default_runs()
  double resolution = 1.0;
  double min_gain = 1e-7;
  int max_passes = 20;
  std::uint64_t seed = 42;

  std::string locations_path = "locations.csv";
  std::string rentals_path = "rentals.csv";
  std::string output_dir = "out";

  bool synth_enabled = false;
  synth::SynthConfig synth;

  // t_null/aggregate, t_day/bucket-similarity, t_hour/bucket-similarity
  static std::vector<GranularityRun> default_runs();
  std::vector<GranularityRun> effective_runs() const;
  community::LouvainConfig louvain_config() const;
};

// Throws ConfigError on invalid settings; prints a warning when
// cluster_cut < absorption_radius (allowed but suspicious).
void validate(const PipelineConfig& cfg);

struct StageStats {
  std::vector<std::pair<std::string, std::string>> rows;  // measure -> value

  void add(const std::string& measure, const std::string& value);
  void add(const std::string& measure, std::uint64_t value);
};

// Stage entry points. Every stage reads its inputs from files and writes its
// artifacts back, so a full run and a stage-by-stage rerun produce identical
// bytes. Inputs for `clean` come from cfg.locations_path / cfg.rentals_path
// (or the synth output when enabled); later stages read from cfg.output_dir.
StageStats stage_synth(const PipelineConfig& cfg);
StageStats stage_clean(const PipelineConfig& cfg);
StageStats stage_cluster(const PipelineConfig& cfg);
StageStats stage_select(const PipelineConfig& cfg);
StageStats stage_graph(const PipelineConfig& cfg);
StageStats stage_detect(const PipelineConfig& cfg);
StageStats stage_report(const PipelineConfig& cfg);

// synth? -> clean -> cluster -> select -> graph -> detect -> report, then
// run_summary.csv. Errors from a stage are rethrown with the stage name.
StageStats run_pipeline(const PipelineConfig& cfg);

}  // namespace bss::pipeline
