#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

namespace oracles {

double ellipsoidal_distance_m(bss::geo::GeoPoint a, bss::geo::GeoPoint b) {
  constexpr double kEquatorialRadiusKm = 6378.137;
  constexpr double kFlattening = 1.0 / 298.257223563;
  constexpr double kE2 = kFlattening * (2.0 - kFlattening);
  constexpr double kRad = bss::geo::kPi / 180.0;

  const double mid_lat = (a.lat + b.lat) / 2.0;
  const double mul = kRad * kEquatorialRadiusKm * 1000.0;
  const double cos_lat = std::cos(mid_lat * kRad);
  const double w2 = 1.0 / (1.0 - kE2 * (1.0 - cos_lat * cos_lat));
  const double w = std::sqrt(w2);
  const double kx = mul * w * cos_lat;            // meters per degree longitude
  const double ky = mul * w * w2 * (1.0 - kE2);   // meters per degree latitude
  const double dx = (a.lon - b.lon) * kx;
  const double dy = (a.lat - b.lat) * ky;
  return std::hypot(dx, dy);
}

std::vector<std::vector<std::string>> naive_complete_linkage(
    std::span<const bss::cluster::PointRecord> points, double cut_m) {
  std::unordered_map<std::string, bss::geo::GeoPoint> point_of;
  std::vector<std::vector<std::string>> clusters;
  for (const auto& p : points) {
    point_of.emplace(p.id, p.point);
    clusters.push_back({p.id});
  }
  for (auto& c : clusters) std::sort(c.begin(), c.end());
  std::sort(clusters.begin(), clusters.end());

  while (clusters.size() > 1) {
    double best_d = std::numeric_limits<double>::infinity();
    std::pair<std::string, std::string> best_key;
    std::size_t best_i = 0, best_j = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i) {
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        double linkage = 0.0;
        for (const auto& a : clusters[i]) {
          for (const auto& b : clusters[j]) {
            linkage = std::max(
                linkage,
                bss::geo::haversine_distance(point_of.at(a), point_of.at(b)).value);
          }
        }
        std::pair<std::string, std::string> key{clusters[i].front(), clusters[j].front()};
        if (key.second < key.first) std::swap(key.first, key.second);
        if (linkage < best_d || (linkage == best_d && key < best_key)) {
          best_d = linkage;
          best_key = key;
          best_i = i;
          best_j = j;
        }
      }
    }
    if (best_d > cut_m) break;
    clusters[best_i].insert(clusters[best_i].end(), clusters[best_j].begin(),
                            clusters[best_j].end());
    std::sort(clusters[best_i].begin(), clusters[best_i].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(best_j));
  }
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return clusters;
}

std::vector<std::pair<std::string, std::string>> naive_absorption(
    std::span<const bss::cluster::PointRecord> locations,
    std::span<const bss::cluster::PointRecord> stations, double radius_m) {
  std::vector<std::pair<std::string, std::string>> absorbed;
  for (const auto& loc : locations) {
    double best = std::numeric_limits<double>::infinity();
    std::string best_id;
    for (const auto& st : stations) {
      const double d = bss::geo::haversine_distance(loc.point, st.point).value;
      if (d < best || (d == best && st.id < best_id)) {
        best = d;
        best_id = st.id;
      }
    }
    if (best <= radius_m) absorbed.emplace_back(loc.id, best_id);
  }
  std::sort(absorbed.begin(), absorbed.end());
  return absorbed;
}

NaiveCleanResult naive_clean(std::span<const bss::ingest::Location> locations,
                             std::span<const bss::ingest::Rental> rentals,
                             const bss::geo::BoundingRegion& region) {
  std::unordered_map<std::string, const bss::ingest::Location*> locs;
  for (const auto& l : locations) locs.emplace(l.location_id, &l);
  std::unordered_map<std::string, const bss::ingest::Rental*> rents;
  for (const auto& r : rentals) rents.emplace(r.rental_id, &r);

  auto drop_rentals_touching = [&](const std::unordered_set<std::string>& gone) {
    for (auto it = rents.begin(); it != rents.end();) {
      if (gone.count(it->second->rental_location_id) ||
          gone.count(it->second->return_location_id)) {
        it = rents.erase(it);
      } else {
        ++it;
      }
    }
  };

  std::unordered_set<std::string> gone;
  for (auto it = locs.begin(); it != locs.end();) {
    const auto* l = it->second;
    if (l->has_coordinates && !bss::geo::contains(region, l->point)) {
      gone.insert(it->first);
      it = locs.erase(it);
    } else {
      ++it;
    }
  }
  drop_rentals_touching(gone);

  gone.clear();
  for (auto it = locs.begin(); it != locs.end();) {
    if (!it->second->has_coordinates) {
      gone.insert(it->first);
      it = locs.erase(it);
    } else {
      ++it;
    }
  }
  drop_rentals_touching(gone);

  for (auto it = rents.begin(); it != rents.end();) {
    if (it->second->rental_location_id.empty() || it->second->return_location_id.empty()) {
      it = rents.erase(it);
    } else {
      ++it;
    }
  }

  bool changed = true;
  while (changed) {
    changed = false;
    for (auto it = rents.begin(); it != rents.end();) {
      if (!locs.count(it->second->rental_location_id) ||
          !locs.count(it->second->return_location_id)) {
        it = rents.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
    std::unordered_set<std::string> referenced;
    for (const auto& [id, r] : rents) {
      referenced.insert(r->rental_location_id);
      referenced.insert(r->return_location_id);
    }
    for (auto it = locs.begin(); it != locs.end();) {
      if (!it->second->is_fixed_station && !referenced.count(it->first)) {
        it = locs.erase(it);
        changed = true;
      } else {
        ++it;
      }
    }
  }

  NaiveCleanResult out;
  for (const auto& [id, unused] : locs) out.location_ids.insert(id);
  for (const auto& [id, unused] : rents) out.rental_ids.insert(id);
  return out;
}

namespace {

std::vector<std::vector<double>> adjacency(int n, std::span<const Edge> edges) {
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (const auto& e : edges) {
    if (e.u == e.v) {
      a[e.u][e.u] += 2.0 * e.w;
    } else {
      a[e.u][e.v] += e.w;
      a[e.v][e.u] += e.w;
    }
  }
  return a;
}

double modularity_from_adjacency(const std::vector<std::vector<double>>& a,
                                 std::span<const int> assignment) {
  const int n = static_cast<int>(a.size());
  double two_m = 0.0;
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) two_m += a[u][v];
  }
  const int num_communities =
      assignment.empty() ? 0 : *std::max_element(assignment.begin(), assignment.end()) + 1;
  std::vector<double> sum_in(num_communities, 0.0);
  std::vector<double> sum_tot(num_communities, 0.0);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) {
      if (assignment[u] == assignment[v]) sum_in[assignment[u]] += a[u][v];
      sum_tot[assignment[u]] += a[u][v];
    }
  }
  double q = 0.0;
  for (int c = 0; c < num_communities; ++c) {
    q += sum_in[c] / two_m - (sum_tot[c] * sum_tot[c]) / (two_m * two_m);
  }
  return q;
}

}  // namespace

double direct_modularity(int n, std::span<const Edge> edges, std::span<const int> assignment) {
  return modularity_from_adjacency(adjacency(n, edges), assignment);
}

std::vector<int> reference_louvain(int n, std::span<const Edge> edges, double& q_out) {
  std::vector<std::vector<double>> a = adjacency(n, edges);
  std::vector<int> global(n);
  std::iota(global.begin(), global.end(), 0);

  for (;;) {
    const int level_n = static_cast<int>(a.size());
    std::vector<int> comm(level_n);
    std::iota(comm.begin(), comm.end(), 0);

    bool any_move = true;
    bool improved = false;
    while (any_move) {
      any_move = false;
      for (int u = 0; u < level_n; ++u) {
        const double q_before = modularity_from_adjacency(a, comm);
        const int original = comm[u];
        int best = original;
        double best_q = q_before;
        std::set<int> tried;
        for (int v = 0; v < level_n; ++v) {
          if (v == u || a[u][v] == 0.0) continue;
          if (!tried.insert(comm[v]).second || comm[v] == original) continue;
          comm[u] = comm[v];
          const double q_after = modularity_from_adjacency(a, comm);
          if (q_after > best_q + 1e-12) {
            best_q = q_after;
            best = comm[v];
          }
          comm[u] = original;
        }
        if (best != original) {
          comm[u] = best;
          any_move = true;
          improved = true;
        }
      }
    }
    if (!improved) {
      q_out = modularity_from_adjacency(a, comm);
      break;
    }

    // Relabel densely and aggregate into the next-level dense matrix.
    std::vector<int> used(comm.begin(), comm.end());
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    std::unordered_map<int, int> dense;
    for (std::size_t i = 0; i < used.size(); ++i) dense[used[i]] = static_cast<int>(i);
    for (auto& c : comm) c = dense[c];
    for (auto& g : global) g = comm[g];

    const int next_n = static_cast<int>(used.size());
    std::vector<std::vector<double>> next(next_n, std::vector<double>(next_n, 0.0));
    for (int u = 0; u < level_n; ++u) {
      for (int v = 0; v < level_n; ++v) next[comm[u]][comm[v]] += a[u][v];
    }
    if (next_n == level_n) {
      q_out = modularity_from_adjacency(a, comm);
      break;
    }
    a = std::move(next);
  }

  // q_out refers to the final aggregated level; recompute on the original
  // scale for the caller (identical by construction, but explicit).
  std::vector<std::vector<double>> original = adjacency(n, edges);
  q_out = modularity_from_adjacency(original, global);
  return global;
}

double adjusted_rand_index(std::span<const int> a, std::span<const int> b) {
  const std::size_t n = a.size();
  std::map<std::pair<int, int>, double> contingency;
  std::map<int, double> row_sum;
  std::map<int, double> col_sum;
  for (std::size_t i = 0; i < n; ++i) {
    contingency[{a[i], b[i]}] += 1.0;
    row_sum[a[i]] += 1.0;
    col_sum[b[i]] += 1.0;
  }
  auto choose2 = [](double x) { return x * (x - 1.0) / 2.0; };
  double sum_nij = 0.0, sum_ai = 0.0, sum_bj = 0.0;
  for (const auto& [key, v] : contingency) sum_nij += choose2(v);
  for (const auto& [key, v] : row_sum) sum_ai += choose2(v);
  for (const auto& [key, v] : col_sum) sum_bj += choose2(v);
  const double total = choose2(static_cast<double>(n));
  const double expected = sum_ai * sum_bj / total;
  const double max_index = (sum_ai + sum_bj) / 2.0;
  if (max_index == expected) return 1.0;  // both partitions trivial
  return (sum_nij - expected) / (max_index - expected);
}

std::vector<Edge> karate_club() {
  static const int pairs[][2] = {
      {0, 1},   {0, 2},   {0, 3},   {0, 4},   {0, 5},   {0, 6},   {0, 7},   {0, 8},
      {0, 10},  {0, 11},  {0, 12},  {0, 13},  {0, 17},  {0, 19},  {0, 21},  {0, 31},
      {1, 2},   {1, 3},   {1, 7},   {1, 13},  {1, 17},  {1, 19},  {1, 21},  {1, 30},
      {2, 3},   {2, 7},   {2, 8},   {2, 9},   {2, 13},  {2, 27},  {2, 28},  {2, 32},
      {3, 7},   {3, 12},  {3, 13},  {4, 6},   {4, 10},  {5, 6},   {5, 10},  {5, 16},
      {6, 16},  {8, 30},  {8, 32},  {8, 33},  {9, 33},  {13, 33}, {14, 32}, {14, 33},
      {15, 32}, {15, 33}, {18, 32}, {18, 33}, {19, 33}, {20, 32}, {20, 33}, {22, 32},
      {22, 33}, {23, 25}, {23, 27}, {23, 29}, {23, 32}, {23, 33}, {24, 25}, {24, 27},
      {24, 31}, {25, 31}, {26, 29}, {26, 33}, {27, 33}, {28, 31}, {28, 33}, {29, 32},
      {29, 33}, {30, 32}, {30, 33}, {31, 32}, {31, 33}, {32, 33}};
  std::vector<Edge> edges;
  for (const auto& p : pairs) edges.push_back({p[0], p[1], 1.0});
  return edges;
}

bss::graph::UndirectedProjection make_projection(int n, std::span<const Edge> edges) {
  bss::graph::UndirectedProjection p;
  char buf[16];
  for (int i = 0; i < n; ++i) {
    std::snprintf(buf, sizeof(buf), "N%03d", i);
    p.node_ids.emplace_back(buf);
    p.node_is_fixed.push_back(false);
  }
  for (const auto& e : edges) {
    const auto u = static_cast<std::uint32_t>(std::min(e.u, e.v));
    const auto v = static_cast<std::uint32_t>(std::max(e.u, e.v));
    p.edges[{u, v}] += e.w;
  }
  return p;
}

}  // namespace oracles
