#include "bss/cluster.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numeric>
#include <unordered_map>

#include "bss/errors.hpp"

namespace bss::cluster {

namespace {

using geo::detail::haversine_rad;
using geo::detail::RadPoint;
using geo::detail::to_rad_point;

struct UnionFind {
  std::vector<int> parent;

  explicit UnionFind(std::size_t n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

// Merge-candidate ordering: linkage first, then the sorted pair of smallest
// member indices. Indices follow lexicographic id order, so this realizes the
// smallest-member-id tie-break.
struct PairKey {
  double dist = std::numeric_limits<double>::infinity();
  int r1 = -1;
  int r2 = -1;

  bool operator<(const PairKey& o) const {
    if (dist != o.dist) return dist < o.dist;
    if (r1 != o.r1) return r1 < o.r1;
    return r2 < o.r2;
  }
};

PairKey make_key(double dist, int rep_a, int rep_b) {
  return PairKey{dist, std::min(rep_a, rep_b), std::max(rep_a, rep_b)};
}

// Greedy complete-linkage agglomeration of one component. `idx` holds global
// point indices (ascending); returns member lists as global indices.
std::vector<std::vector<int>> agglomerate_component(const std::vector<int>& idx,
                                                    const std::vector<RadPoint>& rad,
                                                    double cut) {
  const std::size_t s = idx.size();
  std::vector<std::vector<int>> members(s);
  for (std::size_t i = 0; i < s; ++i) members[i] = {idx[i]};
  if (s == 1) return members;

  std::vector<double> dist(s * s, 0.0);
  for (std::size_t i = 0; i < s; ++i) {
    for (std::size_t j = i + 1; j < s; ++j) {
      const double d = haversine_rad(rad[idx[i]], rad[idx[j]]);
      dist[i * s + j] = d;
      dist[j * s + i] = d;
    }
  }

  std::vector<bool> active(s, true);
  std::vector<int> rep(s);  // smallest member index; idx is ascending
  for (std::size_t i = 0; i < s; ++i) rep[i] = idx[i];

  std::vector<PairKey> best(s);
  std::vector<int> best_j(s, -1);
  auto recompute_best = [&](std::size_t i) {
    best[i] = PairKey{};
    best_j[i] = -1;
    for (std::size_t k = 0; k < s; ++k) {
      if (k == i || !active[k]) continue;
      const PairKey key = make_key(dist[i * s + k], rep[i], rep[k]);
      if (key < best[i]) {
        best[i] = key;
        best_j[i] = static_cast<int>(k);
      }
    }
  };
  for (std::size_t i = 0; i < s; ++i) recompute_best(i);

  double last_linkage = 0.0;
  std::size_t remaining = s;
  while (remaining > 1) {
    std::size_t arg = s;
    PairKey min_key;
    for (std::size_t i = 0; i < s; ++i) {
      if (active[i] && best_j[i] >= 0 && best[i] < min_key) {
        min_key = best[i];
        arg = i;
      }
    }
    if (arg == s || min_key.dist > cut) break;

    // Complete linkage is reducible; successive merge distances cannot shrink.
    if (min_key.dist < last_linkage) {
      throw InvariantError("complete-linkage merge sequence decreased");
    }
    last_linkage = min_key.dist;

    std::size_t a = arg;
    std::size_t b = static_cast<std::size_t>(best_j[arg]);
    if (rep[b] < rep[a]) std::swap(a, b);  // survivor keeps the smaller rep

    members[a].insert(members[a].end(), members[b].begin(), members[b].end());
    members[b].clear();
    active[b] = false;
    --remaining;

    for (std::size_t k = 0; k < s; ++k) {
      if (!active[k] || k == a) continue;
      const double merged = std::max(dist[a * s + k], dist[b * s + k]);
      dist[a * s + k] = merged;
      dist[k * s + a] = merged;
    }
    recompute_best(a);
    for (std::size_t k = 0; k < s; ++k) {
      if (!active[k] || k == a) continue;
      if (best_j[k] == static_cast<int>(a) || best_j[k] == static_cast<int>(b)) {
        recompute_best(k);
      }
    }
  }

  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i < s; ++i) {
    if (active[i]) {
      std::sort(members[i].begin(), members[i].end());
      out.push_back(std::move(members[i]));
    }
  }
  return out;
}

}  // namespace

Absorption absorb_near_stations(std::span<const PointRecord> locations,
                                std::span<const PointRecord> fixed_stations,
                                geo::Meters radius) {
  if (fixed_stations.empty()) throw DataError("no fixed stations for absorption");

  std::vector<RadPoint> station_rad;
  station_rad.reserve(fixed_stations.size());
  for (const auto& st : fixed_stations) station_rad.push_back(to_rad_point(st.point));

  Absorption out;
  for (const auto& loc : locations) {
    const RadPoint p = to_rad_point(loc.point);
    double best = std::numeric_limits<double>::infinity();
    const std::string* best_station = nullptr;
    for (std::size_t s = 0; s < fixed_stations.size(); ++s) {
      const double d = haversine_rad(p, station_rad[s]);
      if (d < best || (d == best && best_station && fixed_stations[s].id < *best_station)) {
        best = d;
        best_station = &fixed_stations[s].id;
      }
    }
    if (best <= radius.value) {
      out.absorbed.emplace_back(loc.id, *best_station);
    } else {
      out.remaining.push_back(loc);
    }
  }
  std::sort(out.absorbed.begin(), out.absorbed.end());
  return out;
}

std::vector<std::vector<std::string>> hac_complete_linkage(
    std::span<const PointRecord> points, geo::Meters cut) {
  const std::size_t n = points.size();
  if (n == 0) return {};

  // Index points in lexicographic id order so index order = id order.
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return points[a].id < points[b].id; });
  for (std::size_t i = 1; i < n; ++i) {
    if (points[order[i - 1]].id == points[order[i]].id) {
      throw DataError("duplicate point id '" + points[order[i]].id + "'");
    }
  }

  std::vector<RadPoint> rad(n);
  double min_cos = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    rad[i] = to_rad_point(points[order[i]].point);
    min_cos = std::min(min_cos, rad[i].cos_phi);
  }
  min_cos = std::max(min_cos, 0.01);

  // Pairs farther apart than the cut can never share a cluster (complete
  // linkage bounds the diameter), so clustering decomposes over the connected
  // components of the <=cut proximity graph. A cut-sized grid finds them
  // without the full distance matrix.
  const double lat_cell = cut.value / geo::kEarthRadius * 180.0 / geo::kPi;
  const double lon_cell = cut.value / (geo::kEarthRadius * min_cos) * 180.0 / geo::kPi;

  std::unordered_map<std::uint64_t, std::vector<int>> grid;
  auto cell_of = [&](std::size_t i) -> std::pair<std::int32_t, std::int32_t> {
    return {static_cast<std::int32_t>(std::floor(points[order[i]].point.lat / lat_cell)),
            static_cast<std::int32_t>(std::floor(points[order[i]].point.lon / lon_cell))};
  };
  auto cell_key = [](std::int32_t cx, std::int32_t cy) -> std::uint64_t {
    return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(cx)) << 32) |
           static_cast<std::uint32_t>(cy);
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto [cx, cy] = cell_of(i);
    grid[cell_key(cx, cy)].push_back(static_cast<int>(i));
  }

  UnionFind uf(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto [cx, cy] = cell_of(i);
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        const auto it = grid.find(cell_key(cx + dx, cy + dy));
        if (it == grid.end()) continue;
        for (const int j : it->second) {
          if (j >= static_cast<int>(i)) continue;
          if (haversine_rad(rad[i], rad[j]) <= cut.value) {
            uf.unite(static_cast<int>(i), j);
          }
        }
      }
    }
  }

  std::unordered_map<int, std::vector<int>> components;
  for (std::size_t i = 0; i < n; ++i) {
    components[uf.find(static_cast<int>(i))].push_back(static_cast<int>(i));
  }
  std::vector<int> roots;
  roots.reserve(components.size());
  for (const auto& [root, _] : components) roots.push_back(root);
  std::sort(roots.begin(), roots.end());

  std::vector<std::vector<std::string>> clusters;
  for (const int root : roots) {
    for (auto& member_idx : agglomerate_component(components[root], rad, cut.value)) {
      std::vector<std::string> ids;
      ids.reserve(member_idx.size());
      for (const int m : member_idx) ids.push_back(points[order[m]].id);
      clusters.push_back(std::move(ids));
    }
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return clusters;
}

ClusterSet finalize_clusters(const std::vector<std::vector<std::string>>& candidate_members,
                             const Absorption& absorption,
                             std::span<const PointRecord> fixed_stations,
                             std::span<const PointRecord> candidate_points) {
  std::unordered_map<std::string, geo::GeoPoint> point_of;
  for (const auto& p : candidate_points) point_of.emplace(p.id, p.point);

  ClusterSet out;
  out.absorbed = absorption.absorbed;

  std::vector<const PointRecord*> stations;
  stations.reserve(fixed_stations.size());
  for (const auto& st : fixed_stations) stations.push_back(&st);
  std::sort(stations.begin(), stations.end(),
            [](const PointRecord* a, const PointRecord* b) { return a->id < b->id; });

  std::unordered_map<std::string, std::vector<std::string>> absorbed_by_station;
  for (const auto& [loc, st] : absorption.absorbed) absorbed_by_station[st].push_back(loc);

  for (const PointRecord* st : stations) {
    Cluster c;
    c.cluster_id = st->id;
    c.anchored_station_id = st->id;
    c.centroid = st->point;
    c.member_location_ids.push_back(st->id);
    if (const auto it = absorbed_by_station.find(st->id); it != absorbed_by_station.end()) {
      c.member_location_ids.insert(c.member_location_ids.end(), it->second.begin(),
                                   it->second.end());
    }
    std::sort(c.member_location_ids.begin(), c.member_location_ids.end());
    out.clusters.push_back(std::move(c));
  }

  std::size_t seq = 0;
  for (const auto& members : candidate_members) {
    Cluster c;
    char id[16];
    std::snprintf(id, sizeof(id), "C%06zu", ++seq);
    c.cluster_id = id;
    c.member_location_ids = members;
    std::sort(c.member_location_ids.begin(), c.member_location_ids.end());
    std::vector<geo::GeoPoint> pts;
    pts.reserve(members.size());
    for (const auto& m : c.member_location_ids) {
      const auto it = point_of.find(m);
      if (it == point_of.end()) {
        throw InvariantError("cluster member '" + m + "' has no known coordinates");
      }
      pts.push_back(it->second);
    }
    c.centroid = geo::centroid(pts);
    out.clusters.push_back(std::move(c));
  }
  return out;
}

}  // namespace bss::cluster
