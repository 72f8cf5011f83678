#include "bss/select.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>
#include <unordered_set>

#include "bss/errors.hpp"

namespace bss::select {

namespace {

using geo::detail::haversine_rad;
using geo::detail::RadPoint;
using geo::detail::to_rad_point;

}  // namespace

EndpointCounts count_endpoints(std::span<const ingest::Rental> rentals) {
  EndpointCounts counts;
  for (const auto& r : rentals) {
    ++counts.outbound[r.rental_location_id];
    ++counts.inbound[r.return_location_id];
    ++counts.total_trips;
  }
  return counts;
}

std::uint64_t compute_degree(std::span<const std::string> member_location_ids,
                             const EndpointCounts& counts) {
  std::uint64_t degree = 0;
  for (const auto& id : member_location_ids) {
    if (const auto it = counts.outbound.find(id); it != counts.outbound.end()) {
      degree += it->second;
    }
    if (const auto it = counts.inbound.find(id); it != counts.inbound.end()) {
      degree += it->second;
    }
  }
  return degree;
}

std::uint64_t min_fixed_degree(std::span<const std::uint64_t> fixed_degrees) {
  if (fixed_degrees.empty()) throw DataError("no fixed stations for degree threshold");
  return *std::min_element(fixed_degrees.begin(), fixed_degrees.end());
}

SelectionResult select_stations(std::vector<Candidate> candidates,
                                std::span<const FixedStationInfo> fixed,
                                geo::Meters proximity) {
  std::vector<std::uint64_t> fixed_degrees;
  fixed_degrees.reserve(fixed.size());
  for (const auto& f : fixed) fixed_degrees.push_back(f.degree);
  const std::uint64_t threshold = min_fixed_degree(fixed_degrees);

  std::vector<RadPoint> fixed_rad;
  fixed_rad.reserve(fixed.size());
  for (const auto& f : fixed) fixed_rad.push_back(to_rad_point(f.point));

  std::vector<RadPoint> cand_rad;
  cand_rad.reserve(candidates.size());
  for (const auto& c : candidates) cand_rad.push_back(to_rad_point(c.centroid));

  // Initial scoring.
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    auto& c = candidates[i];
    c.score = c.degree;
    if (c.degree < threshold) {
      c.score = 0;
      continue;
    }
    for (const auto& st : fixed_rad) {
      if (haversine_rad(cand_rad[i], st) <= proximity.value) {
        c.score = 0;
        break;
      }
    }
  }

  // Pairwise elimination, scanning from the strongest candidate down so that
  // high-degree candidates lock in before they can be contested.
  std::vector<std::size_t> by_strength(candidates.size());
  for (std::size_t i = 0; i < by_strength.size(); ++i) by_strength[i] = i;
  std::sort(by_strength.begin(), by_strength.end(), [&](std::size_t a, std::size_t b) {
    if (candidates[a].degree != candidates[b].degree) {
      return candidates[a].degree > candidates[b].degree;
    }
    return candidates[a].cluster_id < candidates[b].cluster_id;
  });

  int passes = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    ++passes;
    if (passes > static_cast<int>(candidates.size()) + 1) {
      throw InvariantError("station-selection elimination failed to terminate");
    }
    for (std::size_t ai = 0; ai < by_strength.size(); ++ai) {
      const std::size_t a = by_strength[ai];
      if (candidates[a].score == 0) continue;
      for (std::size_t bi = ai + 1; bi < by_strength.size(); ++bi) {
        const std::size_t b = by_strength[bi];
        if (candidates[b].score == 0) continue;
        if (haversine_rad(cand_rad[a], cand_rad[b]) <= proximity.value) {
          // by_strength puts the lower-degree (or larger-id) member second.
          candidates[b].score = 0;
          changed = true;
        }
      }
    }
  }

  SelectionResult result;
  result.degree_threshold = threshold;
  result.elimination_passes = passes;
  for (const auto& c : candidates) {
    if (c.score > 0) result.selected.push_back(c);
  }
  std::sort(result.selected.begin(), result.selected.end(),
            [](const Candidate& a, const Candidate& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.cluster_id < b.cluster_id;
            });
  return result;
}

StationSet reassign(const cluster::ClusterSet& clusters,
                    std::span<const Candidate> selected,
                    std::span<const cluster::PointRecord> candidate_points) {
  StationSet out;
  std::unordered_set<std::string> selected_ids;
  for (const auto& c : selected) {
    selected_ids.insert(c.cluster_id);
    out.stations.push_back({c.cluster_id, c.centroid, Station::Origin::kSelected});
  }
  for (const auto& cl : clusters.clusters) {
    if (cl.anchored()) {
      out.stations.push_back({cl.anchored_station_id, cl.centroid, Station::Origin::kFixed});
    }
  }
  std::sort(out.stations.begin(), out.stations.end(),
            [](const Station& a, const Station& b) { return a.station_id < b.station_id; });
  for (std::size_t i = 1; i < out.stations.size(); ++i) {
    if (out.stations[i - 1].station_id == out.stations[i].station_id) {
      throw DataError("station id collision: '" + out.stations[i].station_id + "'");
    }
  }

  std::vector<RadPoint> station_rad;
  station_rad.reserve(out.stations.size());
  for (const auto& st : out.stations) station_rad.push_back(to_rad_point(st.point));

  std::unordered_map<std::string, geo::GeoPoint> point_of;
  for (const auto& p : candidate_points) point_of.emplace(p.id, p.point);

  auto nearest_station = [&](const geo::GeoPoint& p) -> const std::string& {
    const RadPoint rp = to_rad_point(p);
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t s = 0; s < station_rad.size(); ++s) {
      const double d = haversine_rad(rp, station_rad[s]);
      if (d < best) {  // stations sorted by id, so first hit wins ties
        best = d;
        arg = s;
      }
    }
    return out.stations[arg].station_id;
  };

  for (const auto& cl : clusters.clusters) {
    if (cl.anchored()) {
      for (const auto& loc : cl.member_location_ids) {
        out.assignment[loc] = cl.anchored_station_id;
      }
    } else if (selected_ids.count(cl.cluster_id)) {
      for (const auto& loc : cl.member_location_ids) {
        out.assignment[loc] = cl.cluster_id;
      }
    } else {
      for (const auto& loc : cl.member_location_ids) {
        const auto it = point_of.find(loc);
        if (it == point_of.end()) {
          throw InvariantError("location '" + loc + "' has no known coordinates");
        }
        out.assignment[loc] = nearest_station(it->second);
      }
    }
  }
  return out;
}

}  // namespace bss::select
