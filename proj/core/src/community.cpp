#include "bss/community.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "bss/errors.hpp"
#include "bss/rng.hpp"

namespace bss::community {

void validate(const LouvainConfig& cfg) {
  if (!(cfg.resolution > 0.0) || !std::isfinite(cfg.resolution)) {
    throw ConfigError("louvain resolution must be a positive real");
  }
  if (!(cfg.min_gain > 0.0) || !std::isfinite(cfg.min_gain)) {
    throw ConfigError("louvain min_gain must be a positive real");
  }
  if (cfg.max_passes < 1) {
    throw ConfigError("louvain max_passes must be a positive integer");
  }
}

int Partition::num_communities() const {
  int max_id = -1;
  for (const int c : assignment) max_id = std::max(max_id, c);
  return max_id + 1;
}

namespace {

// Flattened working graph: adjacency without loops, loops held separately.
struct LevelGraph {
  std::vector<std::vector<std::pair<int, double>>> adj;
  std::vector<double> loop;
  std::vector<double> degree;  // k_u = sum w(u,v) + 2 * loop_u
  double two_m = 0.0;

  std::size_t size() const { return adj.size(); }

  void finish_degrees() {
    degree.assign(adj.size(), 0.0);
    two_m = 0.0;
    for (std::size_t u = 0; u < adj.size(); ++u) {
      double k = 0.0;
      for (const auto& [v, w] : adj[u]) k += w;
      k += 2.0 * loop[u];
      degree[u] = k;
      two_m += k;
    }
  }
};

LevelGraph from_projection(const graph::UndirectedProjection& p) {
  LevelGraph g;
  g.adj.resize(p.node_ids.size());
  g.loop.assign(p.node_ids.size(), 0.0);
  for (const auto& [key, w] : p.edges) {
    const int u = static_cast<int>(key.first);
    const int v = static_cast<int>(key.second);
    if (u == v) {
      g.loop[u] += w;
    } else {
      g.adj[u].emplace_back(v, w);
      g.adj[v].emplace_back(u, w);
    }
  }
  // Keep neighbour order id-ascending so every summation order is pinned.
  for (auto& nbrs : g.adj) std::sort(nbrs.begin(), nbrs.end());
  g.finish_degrees();
  return g;
}

// Generalized modularity (gamma-scaled null model) of an assignment.
double q_of(const LevelGraph& g, std::span<const int> comm, double gamma) {
  std::map<int, double> sum_in;
  std::map<int, double> sum_tot;
  for (std::size_t u = 0; u < g.size(); ++u) {
    double intra = 0.0;
    for (const auto& [v, w] : g.adj[u]) {
      if (comm[v] == comm[u]) intra += w;
    }
    intra += 2.0 * g.loop[u];
    sum_in[comm[u]] += intra;
    sum_tot[comm[u]] += g.degree[u];
  }
  double q = 0.0;
  for (const auto& [c, tot] : sum_tot) {
    const double frac = tot / g.two_m;
    q += sum_in[c] / g.two_m - gamma * frac * frac;
  }
  return q;
}

// One local-moving phase; returns total modularity gain. Node visits follow
// a fresh seeded shuffle each sweep; the algorithm is order-dependent, so the
// rng is the single source of nondeterminism and the seed pins it.
double local_moving(const LevelGraph& g, std::vector<int>& comm, double gamma,
                    double min_gain, Rng& rng) {
  const double m = g.two_m / 2.0;
  std::vector<double> tot(g.size(), 0.0);
  for (std::size_t u = 0; u < g.size(); ++u) tot[comm[u]] += g.degree[u];

  std::vector<int> order(g.size());
  std::iota(order.begin(), order.end(), 0);

  double phase_gain = 0.0;
  bool moved = true;
  while (moved) {
    moved = false;
    rng.shuffle(order);
    for (const int u : order) {
      const int c = comm[u];
      // Weight towards each neighbouring community; ordered map so that
      // equal gains resolve to the lowest community id.
      std::map<int, double> affinity;
      affinity[c] += 0.0;
      for (const auto& [v, w] : g.adj[u]) {
        if (v != u) affinity[comm[v]] += w;
      }
      const double aff_c = affinity[c];
      const double tot_c_less_u = tot[c] - g.degree[u];

      int best = c;
      double best_gain = 0.0;
      for (const auto& [d, aff_d] : affinity) {
        if (d == c) continue;
        const double gain = (aff_d - aff_c) / m +
                            gamma * g.degree[u] * (tot_c_less_u - tot[d]) / (2.0 * m * m);
        if (gain > best_gain) {
          best_gain = gain;
          best = d;
        }
      }
      if (best != c && best_gain > min_gain) {
        tot[c] -= g.degree[u];
        tot[best] += g.degree[u];
        comm[u] = best;
        phase_gain += best_gain;
        moved = true;
      }
    }
  }
  return phase_gain;
}

// Collapses communities into super-nodes; intra-community weight becomes a
// self-loop. `community_to_super` maps each used community id onto its dense
// super-node id (-1 for unused ids).
LevelGraph aggregate(const LevelGraph& g, const std::vector<int>& comm,
                     std::vector<int>& community_to_super) {
  std::vector<int> used(comm.begin(), comm.end());
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  community_to_super.assign(g.size(), -1);
  for (std::size_t i = 0; i < used.size(); ++i) {
    community_to_super[used[i]] = static_cast<int>(i);
  }

  LevelGraph out;
  out.adj.resize(used.size());
  out.loop.assign(used.size(), 0.0);
  std::map<std::pair<int, int>, double> edges;
  for (std::size_t u = 0; u < g.size(); ++u) {
    const int cu = community_to_super[comm[u]];
    out.loop[cu] += g.loop[u];
    for (const auto& [v, w] : g.adj[u]) {
      if (static_cast<int>(u) < v) {
        const int cv = community_to_super[comm[v]];
        if (cu == cv) {
          out.loop[cu] += w;
        } else {
          edges[{std::min(cu, cv), std::max(cu, cv)}] += w;
        }
      }
    }
  }
  for (const auto& [key, w] : edges) {
    out.adj[key.first].emplace_back(key.second, w);
    out.adj[key.second].emplace_back(key.first, w);
  }
  for (auto& nbrs : out.adj) std::sort(nbrs.begin(), nbrs.end());
  out.finish_degrees();
  return out;
}

}  // namespace

double modularity(const graph::UndirectedProjection& p, std::span<const int> assignment) {
  if (assignment.size() != p.node_ids.size()) {
    throw DataError("assignment does not cover all nodes");
  }
  const LevelGraph g = from_projection(p);
  if (g.two_m <= 0.0) throw DataError("empty graph");
  return q_of(g, assignment, 1.0);
}

Partition louvain(const graph::UndirectedProjection& p, const LouvainConfig& cfg) {
  validate(cfg);
  LevelGraph level = from_projection(p);
  if (level.size() == 0 || level.two_m <= 0.0) throw DataError("empty graph");

  Rng rng(cfg.seed);
  const std::size_t n = p.node_ids.size();

  // node -> community on the original graph, refined pass by pass
  std::vector<int> unfolded(n);
  std::iota(unfolded.begin(), unfolded.end(), 0);
  std::vector<int> comm(level.size());
  std::iota(comm.begin(), comm.end(), 0);

  const LevelGraph original = from_projection(p);
  double last_q = q_of(original, unfolded, cfg.resolution);

  Partition out;
  out.pass_q.clear();
  int pass = 0;
  while (pass < cfg.max_passes) {
    ++pass;
    const double gain = local_moving(level, comm, cfg.resolution, cfg.min_gain, rng);

    for (std::size_t u = 0; u < n; ++u) unfolded[u] = comm[unfolded[u]];

    const double q_now = q_of(original, unfolded, cfg.resolution);
    if (q_now + 1e-9 < last_q) {
      throw InvariantError("louvain pass decreased modularity");
    }
    last_q = q_now;
    out.pass_q.push_back(q_now);

    if (gain <= cfg.min_gain) break;

    std::vector<int> community_to_super;
    level = aggregate(level, comm, community_to_super);
    // unfolded currently holds community ids of the old level
    for (std::size_t u = 0; u < n; ++u) unfolded[u] = community_to_super[unfolded[u]];
    comm.assign(level.size(), 0);
    std::iota(comm.begin(), comm.end(), 0);
  }

  // Dense community ids in order of first appearance by node index.
  std::map<int, int> dense;
  out.assignment.resize(n);
  for (std::size_t u = 0; u < n; ++u) {
    const auto [it, inserted] = dense.emplace(unfolded[u], static_cast<int>(dense.size()));
    out.assignment[u] = it->second;
  }
  out.passes = pass;
  out.modularity = modularity(p, out.assignment);
  return out;
}

std::vector<Partition> detect_all(std::span<const DetectionInput> inputs,
                                  const LouvainConfig& cfg) {
  std::vector<Partition> out;
  out.reserve(inputs.size());
  for (const auto& input : inputs) {
    Partition part = louvain(*input.projection, cfg);
    part.granularity = input.granularity;
    part.strategy = std::string(graph::strategy_name(input.strategy));
    out.push_back(std::move(part));
  }
  return out;
}

}  // namespace bss::community
