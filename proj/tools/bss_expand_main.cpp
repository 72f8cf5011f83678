// bss-expand: condenses dockless bike-share trip endpoints into an optimized
// station network and characterizes the trip graph via community detection.

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bss/errors.hpp"
#include "bss/pipeline.hpp"

namespace {

struct CliState {
  bss::pipeline::PipelineConfig cfg;
  std::vector<std::string> granularities;
  std::string strategy_all;
  std::string strategy_t_null = "aggregate";
  std::string strategy_t_day = "bucket-similarity";
  std::string strategy_t_hour = "bucket-similarity";
  std::vector<std::string> profiles_list;
  std::string config_path;
  bool synth_flag = false;
};

// One row per option: the same table drives the CLI11 flags, the BSS_*
// environment names and the config-file keys, so the layers cannot drift.
// Precedence: flags > environment > config file > defaults.
struct Binding {
  enum Kind { kDouble, kInt, kU64, kBool, kString, kStringList };
  std::string key;  // long option name without dashes; also the config key
  Kind kind;
  void* target;
  std::string help;
};

std::string env_name(const std::string& key) {
  std::string out = "BSS_";
  for (const char c : key) out += c == '-' ? '_' : static_cast<char>(std::toupper(c));
  return out;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::string item;
  for (const char c : text) {
    if (c == ',' || c == ' ') {
      if (!item.empty()) out.push_back(item);
      item.clear();
    } else {
      item += c;
    }
  }
  if (!item.empty()) out.push_back(item);
  return out;
}

std::vector<Binding> make_bindings(CliState& st) {
  auto& cfg = st.cfg;
  auto& synth = cfg.synth;
  return {
      {"output-dir", Binding::kString, &cfg.output_dir, "Artifact directory"},
      {"locations", Binding::kString, &cfg.locations_path, "Input locations.csv"},
      {"rentals", Binding::kString, &cfg.rentals_path, "Input rentals.csv"},
      {"region-min-lat", Binding::kDouble, &cfg.region.min_lat, "Region box, degrees"},
      {"region-max-lat", Binding::kDouble, &cfg.region.max_lat, "Region box, degrees"},
      {"region-min-lon", Binding::kDouble, &cfg.region.min_lon, "Region box, degrees"},
      {"region-max-lon", Binding::kDouble, &cfg.region.max_lon, "Region box, degrees"},
      {"land-polygon", Binding::kString, &cfg.land_polygon_path,
       "GeoJSON Polygon used as the on-land filter"},
      {"timezone", Binding::kString, &cfg.timezone,
       "Timezone label recorded with the dataset"},
      {"absorption-radius", Binding::kDouble, &cfg.absorption_radius,
       "Station absorption radius, meters"},
      {"cluster-cut", Binding::kDouble, &cfg.cluster_cut,
       "Complete-linkage cut distance, meters"},
      {"proximity", Binding::kDouble, &cfg.proximity, "Minimum station separation, meters"},
      {"granularity", Binding::kStringList, &st.granularities,
       "Granularities to run (t_null t_day t_hour)"},
      {"strategy", Binding::kString, &st.strategy_all,
       "Projection strategy applied to every granularity"},
      {"strategy-t-null", Binding::kString, &st.strategy_t_null, "Strategy for t_null"},
      {"strategy-t-day", Binding::kString, &st.strategy_t_day, "Strategy for t_day"},
      {"strategy-t-hour", Binding::kString, &st.strategy_t_hour, "Strategy for t_hour"},
      {"seed", Binding::kU64, &cfg.seed, "Master seed (synth + louvain)"},
      {"resolution", Binding::kDouble, &cfg.resolution, "Louvain resolution"},
      {"min-gain", Binding::kDouble, &cfg.min_gain, "Louvain gain tolerance"},
      {"max-passes", Binding::kInt, &cfg.max_passes, "Louvain pass limit"},
      {"synth", Binding::kBool, &st.synth_flag,
       "Generate a synthetic dataset instead of reading inputs (run only)"},
      {"synth-stations", Binding::kInt, &synth.fixed_stations, "Fixed stations"},
      {"synth-hotspots", Binding::kInt, &synth.hotspots, "Station-free hotspots"},
      {"synth-communities", Binding::kInt, &synth.communities, "Planted communities"},
      {"synth-trips", Binding::kU64, &synth.trips, "Trips to generate"},
      {"synth-crossing", Binding::kDouble, &synth.crossing_probability,
       "Probability a trip crosses communities"},
      {"synth-station-share", Binding::kDouble, &synth.station_endpoint_share,
       "Share of endpoints exactly at stations"},
      {"synth-near-station-share", Binding::kDouble, &synth.near_station_share,
       "Share of endpoints jittered near stations"},
      {"synth-jitter", Binding::kDouble, &synth.jitter_meters,
       "Hotspot endpoint jitter radius, meters"},
      {"synth-profiles", Binding::kStringList, &st.profiles_list,
       "Per-community profiles, e.g. commuter,leisure"},
      {"synth-weeks", Binding::kInt, &synth.weeks, "Weeks of data"},
      {"synth-start-date", Binding::kString, &synth.start_date, "First date, YYYY-MM-DD"},
      {"synth-station-spacing", Binding::kDouble, &synth.station_spacing_meters,
       "Minimum station spacing, meters"},
      {"synth-hotspot-spacing", Binding::kDouble, &synth.hotspot_spacing_meters,
       "Minimum hotspot spacing, meters"},
  };
}

void register_options(CLI::App* cmd, const std::vector<Binding>& bindings) {
  for (const auto& b : bindings) {
    const std::string flag = (b.key == "output-dir") ? "--output-dir,-o" : "--" + b.key;
    CLI::Option* option = nullptr;
    switch (b.kind) {
      case Binding::kDouble:
        option = cmd->add_option(flag, *static_cast<double*>(b.target), b.help);
        break;
      case Binding::kInt:
        option = cmd->add_option(flag, *static_cast<int*>(b.target), b.help);
        break;
      case Binding::kU64:
        option = cmd->add_option(flag, *static_cast<std::uint64_t*>(b.target), b.help);
        break;
      case Binding::kBool:
        option = cmd->add_flag(flag, *static_cast<bool*>(b.target), b.help);
        break;
      case Binding::kString:
        option = cmd->add_option(flag, *static_cast<std::string*>(b.target), b.help);
        break;
      case Binding::kStringList:
        option =
            cmd->add_option(flag, *static_cast<std::vector<std::string>*>(b.target), b.help);
        break;
    }
    option->envname(env_name(b.key));
  }
}

void apply_config_value(const Binding& b, const std::string& text) {
  auto bad = [&](const char* what) {
    return bss::ConfigError("config key '" + b.key + "': bad " + what + " '" + text + "'");
  };
  std::size_t pos = 0;
  try {
    switch (b.kind) {
      case Binding::kDouble:
        *static_cast<double*>(b.target) = std::stod(text, &pos);
        if (pos != text.size()) throw bad("number");
        break;
      case Binding::kInt:
        *static_cast<int*>(b.target) = std::stoi(text, &pos);
        if (pos != text.size()) throw bad("integer");
        break;
      case Binding::kU64:
        *static_cast<std::uint64_t*>(b.target) = std::stoull(text, &pos);
        if (pos != text.size()) throw bad("integer");
        break;
      case Binding::kBool: {
        std::string lower = text;
        std::transform(lower.begin(), lower.end(), lower.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (lower == "true" || lower == "1" || lower == "yes") {
          *static_cast<bool*>(b.target) = true;
        } else if (lower == "false" || lower == "0" || lower == "no") {
          *static_cast<bool*>(b.target) = false;
        } else {
          throw bad("boolean");
        }
        break;
      }
      case Binding::kString:
        *static_cast<std::string*>(b.target) = text;
        break;
      case Binding::kStringList:
        *static_cast<std::vector<std::string>*>(b.target) = split_list(text);
        break;
    }
  } catch (const bss::ConfigError&) {
    throw;
  } catch (const std::exception&) {
    throw bad("value");
  }
}

// Flat key=value file; '#' starts a comment. Applied only to options that
// neither a flag nor an environment variable has already set on the parsed
// subcommand.
void apply_config_file(const std::string& path, std::vector<Binding>& bindings,
                       const CLI::App* parsed) {
  std::ifstream in(path);
  if (!in) throw bss::ConfigError("cannot open config file: " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t\r");
    line = line.substr(first, last - first + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw bss::ConfigError(path + ":" + std::to_string(line_no) +
                             ": expected key=value, got '" + line + "'");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    Binding* binding = nullptr;
    for (auto& b : bindings) {
      if (b.key == key) binding = &b;
    }
    if (!binding) {
      throw bss::ConfigError(path + ":" + std::to_string(line_no) +
                             ": unknown config key '" + key + "'");
    }
    // Flags and BSS_* environment variables win over the file.
    const CLI::Option* option = parsed->get_option_no_throw("--" + key);
    if (option != nullptr && option->count() > 0) continue;
    apply_config_value(*binding, value);
  }
}

void finalize_config(CliState& st) {
  namespace graph = bss::graph;
  auto strategy_for = [&](graph::Granularity g) {
    if (!st.strategy_all.empty()) return graph::parse_strategy(st.strategy_all);
    switch (g) {
      case graph::Granularity::kNull: return graph::parse_strategy(st.strategy_t_null);
      case graph::Granularity::kDay: return graph::parse_strategy(st.strategy_t_day);
      case graph::Granularity::kHour: return graph::parse_strategy(st.strategy_t_hour);
    }
    return graph::ProjectionStrategy::kAggregate;
  };

  st.cfg.runs.clear();
  if (st.granularities.empty()) {
    for (const auto& run : bss::pipeline::PipelineConfig::default_runs()) {
      st.cfg.runs.push_back({run.granularity, strategy_for(run.granularity)});
    }
  } else {
    for (const auto& name : st.granularities) {
      const graph::Granularity g = graph::parse_granularity(name);
      st.cfg.runs.push_back({g, strategy_for(g)});
    }
  }
  if (!st.profiles_list.empty()) st.cfg.synth.profile_mix = st.profiles_list;
  bss::pipeline::validate(st.cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dockless bike-share station-network expansion and trip-graph analysis"};
  app.require_subcommand(1);

  CliState st;
  std::vector<Binding> bindings = make_bindings(st);

  using Stage = bss::pipeline::StageStats (*)(const bss::pipeline::PipelineConfig&);
  struct Sub {
    const char* name;
    const char* help;
    Stage stage;
    bool force_synth = false;
  };
  const std::vector<Sub> subs = {
      {"run", "Full pipeline: clean, cluster, select, graph, detect, report",
       &bss::pipeline::run_pipeline},
      {"synth", "Generate a synthetic dataset (locations, rentals, truth)",
       &bss::pipeline::stage_synth, true},
      {"clean", "Parse and clean the input tables", &bss::pipeline::stage_clean},
      {"cluster", "Absorb near-station locations and cluster the rest",
       &bss::pipeline::stage_cluster},
      {"select", "Rank candidates, apply the selection rules, reassign",
       &bss::pipeline::stage_select},
      {"graph", "Build the trip graphs for each granularity", &bss::pipeline::stage_graph},
      {"detect", "Louvain community detection per granularity",
       &bss::pipeline::stage_detect},
      {"report", "Community stats, temporal profiles, GeoJSON export",
       &bss::pipeline::stage_report},
  };

  std::vector<std::pair<CLI::App*, const Sub*>> registered;
  for (const auto& sub : subs) {
    CLI::App* cmd = app.add_subcommand(sub.name, sub.help);
    register_options(cmd, bindings);
    cmd->add_option("--config", st.config_path, "Flat key=value configuration file")
        ->envname("BSS_CONFIG");
    registered.emplace_back(cmd, &sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return 2;
  }

  const auto it = std::find_if(registered.begin(), registered.end(),
                               [](const auto& r) { return r.first->parsed(); });
  const Sub& sub = *it->second;

  try {
    if (!st.config_path.empty()) apply_config_file(st.config_path, bindings, it->first);
    st.cfg.synth_enabled = st.synth_flag || sub.force_synth;
    finalize_config(st);
    const auto stats = sub.stage(st.cfg);
    for (const auto& [measure, value] : stats.rows) {
      std::cout << measure << "=" << value << "\n";
    }
    return 0;
  } catch (const bss::ConfigError& e) {
    std::cerr << "bss-expand " << sub.name << ": " << e.what() << "\n";
    return 2;
  } catch (const bss::DataError& e) {
    std::cerr << "bss-expand " << sub.name << ": " << e.what() << "\n";
    return 3;
  } catch (const bss::InvariantError& e) {
    std::cerr << "bss-expand " << sub.name << ": " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "bss-expand " << sub.name << ": internal error: " << e.what() << "\n";
    return 4;
  }
}
