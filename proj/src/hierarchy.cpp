#include "apbda/hierarchy.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "apbda/cost.hpp"
#include "apbda/errors.hpp"
#include "apbda/random.hpp"

namespace apbda {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Symmetric pairwise distance used by k-medoids.
std::vector<std::vector<double>> medoid_distances(const AgentGraph& graph,
                                                  const std::vector<AgentId>& ids) {
  const std::size_t n = ids.size();
  auto slot = [&](AgentId id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  // Directed all-pairs latency shortest paths (Floyd-Warshall; clustering is
  // done once per run).
  std::vector<std::vector<double>> latency(n, std::vector<double>(n, kInf));
  double latency_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) latency[i][i] = 0.0;
  for (const Link& l : graph.links()) {
    if (!graph.contains(l.from) || !graph.contains(l.to)) continue;
    auto& d = latency[slot(l.from)][slot(l.to)];
    d = std::min(d, l.latency);
    latency_sum += l.latency;
  }
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t i = 0; i < n; ++i) {
      if (latency[i][m] == kInf) continue;
      for (std::size_t j = 0; j < n; ++j) {
        const double via = latency[i][m] + latency[m][j];
        if (via < latency[i][j]) latency[i][j] = via;
      }
    }
  }

  // Undirected hop counts for the fallback.
  std::vector<std::vector<std::size_t>> neighbours(n);
  for (const Link& l : graph.links()) {
    if (!graph.contains(l.from) || !graph.contains(l.to)) continue;
    neighbours[slot(l.from)].push_back(slot(l.to));
    neighbours[slot(l.to)].push_back(slot(l.from));
  }
  const double offset = latency_sum + 1.0;
  std::vector<std::vector<double>> out(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<std::size_t> hops(n, std::numeric_limits<std::size_t>::max());
    std::deque<std::size_t> queue{i};
    hops[i] = 0;
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v : neighbours[u]) {
        if (hops[v] == std::numeric_limits<std::size_t>::max()) {
          hops[v] = hops[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      const double direct = std::min(latency[i][j], latency[j][i]);
      if (direct < kInf) {
        out[i][j] = direct;
      } else if (hops[j] != std::numeric_limits<std::size_t>::max()) {
        out[i][j] = offset + static_cast<double>(hops[j]);
      } else {
        out[i][j] = 2.0 * offset + static_cast<double>(n);
      }
    }
  }
  return out;
}

Clustering assemble(const std::vector<AgentId>& ids, const std::vector<std::size_t>& medoids,
                    const std::vector<std::size_t>& assignment) {
  std::vector<Cluster> clusters(medoids.size());
  for (std::size_t c = 0; c < medoids.size(); ++c) clusters[c].head = ids[medoids[c]];
  for (std::size_t i = 0; i < ids.size(); ++i) clusters[assignment[i]].members.push_back(ids[i]);
  std::sort(clusters.begin(), clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.head < b.head; });
  Clustering out;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    clusters[c].id = static_cast<ClusterId>(c);
    for (AgentId m : clusters[c].members) out.membership[m] = clusters[c].id;
  }
  out.clusters = std::move(clusters);
  return out;
}

}  // namespace

ClusterId Clustering::cluster_of(AgentId id) const {
  auto it = membership.find(id);
  if (it == membership.end()) throw UnknownNode("node " + std::to_string(id) + " is in no cluster");
  return it->second;
}

std::vector<std::string> validate_clustering(const Clustering& clustering, const AgentGraph& graph) {
  std::vector<std::string> out;
  std::set<AgentId> seen;
  for (std::size_t c = 0; c < clustering.clusters.size(); ++c) {
    const Cluster& cluster = clustering.clusters[c];
    const std::string who = "cluster " + std::to_string(cluster.id);
    if (cluster.id != static_cast<ClusterId>(c)) out.push_back(who + ": id does not match position");
    if (cluster.members.empty()) out.push_back(who + ": empty");
    if (std::find(cluster.members.begin(), cluster.members.end(), cluster.head) ==
        cluster.members.end()) {
      out.push_back(who + ": head " + std::to_string(cluster.head) + " is not a member");
    }
    for (AgentId m : cluster.members) {
      if (!graph.contains(m)) out.push_back(who + ": member " + std::to_string(m) + " not in graph");
      if (!seen.insert(m).second) out.push_back(who + ": member " + std::to_string(m) + " repeated");
      auto it = clustering.membership.find(m);
      if (it == clustering.membership.end() || it->second != cluster.id) {
        out.push_back(who + ": membership map disagrees for " + std::to_string(m));
      }
    }
  }
  for (const auto& [id, node] : graph.nodes()) {
    if (!seen.count(id)) out.push_back("node " + std::to_string(id) + " is in no cluster");
  }
  if (clustering.membership.size() != seen.size()) out.push_back("membership map has extra entries");
  return out;
}

Clustering build_clustering(const AgentGraph& graph, std::size_t k, std::uint64_t seed) {
  const std::size_t n = graph.node_count();
  if (k < 1 || k > n) {
    throw InvalidK("cluster count " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
  }
  const std::vector<AgentId> ids = graph.node_ids();
  const auto dist = medoid_distances(graph, ids);

  // Seeded k-medoids++ start: the first medoid is uniform, each further one
  // is drawn with probability proportional to its squared distance from the
  // medoids chosen so far.
  RandomStream rng(seed);
  std::vector<std::size_t> medoids{static_cast<std::size_t>(rng.uniform_index(n))};
  std::vector<double> nearest(n, kInf);
  while (medoids.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], dist[i][medoids.back()]);
      total += nearest[i] * nearest[i];
    }
    std::size_t pick = n;
    if (total > 0.0) {
      double target = rng.uniform01() * total;
      for (std::size_t i = 0; i < n && pick == n; ++i) {
        const double mass = nearest[i] * nearest[i];
        if (mass > 0.0 && target < mass) pick = i;
        target -= mass;
      }
      // Rounding can leave the target past the last positive mass.
      for (std::size_t i = n; pick == n && i-- > 0;) {
        if (nearest[i] > 0.0) pick = i;
      }
    }
    if (pick == n) {
      // Every remaining point coincides with a medoid: take the lowest free one.
      for (std::size_t i = 0; i < n && pick == n; ++i) {
        if (std::find(medoids.begin(), medoids.end(), i) == medoids.end()) pick = i;
      }
    }
    medoids.push_back(pick);
  }
  std::sort(medoids.begin(), medoids.end());

  std::vector<std::size_t> assignment(n, 0);
  auto assign = [&] {
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      for (std::size_t c = 0; c < k; ++c) {
        if (medoids[c] == i) {
          best = c;
          break;
        }
        if (dist[i][medoids[c]] < dist[i][medoids[best]]) best = c;
      }
      assignment[i] = best;
    }
  };

  constexpr int kMaxIterations = 100;
  for (int iteration = 0; iteration < kMaxIterations; ++iteration) {
    assign();
    bool changed = false;
    for (std::size_t c = 0; c < k; ++c) {
      std::size_t best = medoids[c];
      double best_sum = kInf;
      for (std::size_t candidate = 0; candidate < n; ++candidate) {
        if (assignment[candidate] != c) continue;
        double sum = 0.0;
        for (std::size_t other = 0; other < n; ++other) {
          if (assignment[other] == c) sum += dist[candidate][other];
        }
        if (sum < best_sum) {
          best_sum = sum;
          best = candidate;
        }
      }
      if (best != medoids[c]) {
        medoids[c] = best;
        changed = true;
      }
    }
    if (!changed) break;
  }

  // Swap refinement: apply the best medoid/non-medoid exchange while it lowers
  // the total distance to the nearest medoid. The alternating step above
  // stalls when two medoids share one dense group.
  for (int pass = 0; pass < kMaxIterations; ++pass) {
    std::vector<double> d1(n, kInf), d2(n, kInf);
    std::vector<std::size_t> owner(n, 0);
    double current = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t c = 0; c < k; ++c) {
        const double d = dist[i][medoids[c]];
        if (d < d1[i]) {
          d2[i] = d1[i];
          d1[i] = d;
          owner[i] = c;
        } else if (d < d2[i]) {
          d2[i] = d;
        }
      }
      current += d1[i];
    }
    double best_total = current;
    std::size_t best_c = k, best_h = n;
    for (std::size_t c = 0; c < k; ++c) {
      for (std::size_t h = 0; h < n; ++h) {
        if (std::find(medoids.begin(), medoids.end(), h) != medoids.end()) continue;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double keep = owner[i] == c ? d2[i] : d1[i];
          total += std::min(keep, dist[i][h]);
        }
        if (total < best_total - 1e-12 * std::max(1.0, current)) {
          best_total = total;
          best_c = c;
          best_h = h;
        }
      }
    }
    if (best_c == k) break;
    medoids[best_c] = best_h;
    std::sort(medoids.begin(), medoids.end());
  }
  assign();
  return assemble(ids, medoids, assignment);
}

Clustering restrict_clustering(const Clustering& clustering, const AgentGraph& graph) {
  std::vector<Cluster> kept;
  for (const Cluster& cluster : clustering.clusters) {
    Cluster next;
    for (AgentId m : cluster.members) {
      if (graph.contains(m)) next.members.push_back(m);
    }
    if (next.members.empty()) continue;
    next.head = graph.contains(cluster.head) ? cluster.head : next.members.front();
    kept.push_back(std::move(next));
  }
  std::sort(kept.begin(), kept.end(), [](const Cluster& a, const Cluster& b) { return a.head < b.head; });
  Clustering out;
  for (std::size_t c = 0; c < kept.size(); ++c) {
    kept[c].id = static_cast<ClusterId>(c);
    for (AgentId m : kept[c].members) out.membership[m] = kept[c].id;
  }
  out.clusters = std::move(kept);
  return out;
}

SuperGraph build_supergraph(const AgentGraph& graph, const Clustering& clustering) {
  SuperGraph out;
  for (const Cluster& cluster : clustering.clusters) {
    AgentNode head = graph.node(cluster.head);
    head.id = cluster.id;
    out.graph.add_node(head);
  }
  for (const Link& l : graph.links()) {
    const ClusterId x = clustering.cluster_of(l.from);
    const ClusterId y = clustering.cluster_of(l.to);
    if (x != y) out.crossing[{x, y}].push_back(l);
  }
  for (const auto& [pair, links] : out.crossing) {
    Link aggregate{pair.first, pair.second, links.front().bandwidth, links.front().latency};
    for (const Link& l : links) {
      aggregate.bandwidth = std::max(aggregate.bandwidth, l.bandwidth);
      aggregate.latency = std::min(aggregate.latency, l.latency);
    }
    out.graph.add_link(aggregate);
  }
  return out;
}

std::optional<RouteResult> route_hierarchical(const AgentGraph& graph, const Clustering& clustering,
                                              const Task& task, const WeightVector& weights,
                                              const RouterOptions& options) {
  if (!graph.contains(task.source)) throw UnknownNode("unknown source " + std::to_string(task.source));
  if (!graph.contains(task.destination)) {
    throw UnknownNode("unknown destination " + std::to_string(task.destination));
  }
  const ClusterId source_cluster = clustering.cluster_of(task.source);
  const ClusterId destination_cluster = clustering.cluster_of(task.destination);

  auto cluster_graph = [&](ClusterId c) {
    return graph.induced(clustering.clusters.at(static_cast<std::size_t>(c)).members);
  };

  if (source_cluster == destination_cluster) {
    return route(cluster_graph(source_cluster), task, weights, options);
  }

  const SuperGraph super = build_supergraph(graph, clustering);
  Task super_task = task;
  super_task.source = source_cluster;
  super_task.destination = destination_cluster;
  const auto super_route = route(super.graph, super_task, weights, options);
  if (!super_route) return std::nullopt;

  RouteResult result;
  result.nodes_expanded = super_route->nodes_expanded;
  result.edges_relaxed = super_route->edges_relaxed;
  std::vector<AgentId> path{task.source};

  auto append_leg = [&](const RouteResult& leg) {
    path.insert(path.end(), leg.path.begin() + 1, leg.path.end());
    result.nodes_expanded += leg.nodes_expanded;
    result.edges_relaxed += leg.edges_relaxed;
  };

  AgentId current = task.source;
  const auto& sequence = super_route->path;
  for (std::size_t i = 0; i + 1 < sequence.size(); ++i) {
    const AgentGraph inside = cluster_graph(sequence[i]);
    std::vector<std::pair<double, const Link*>> exits;
    for (const Link& l : super.crossing.at({sequence[i], sequence[i + 1]})) {
      exits.emplace_back(
          compute_cost(task, graph.node(l.from), graph.node(l.to), l, weights).total, &l);
    }
    std::stable_sort(exits.begin(), exits.end(), [](const auto& a, const auto& b) {
      if (a.first != b.first) return a.first < b.first;
      return std::make_pair(a.second->from, a.second->to) < std::make_pair(b.second->from, b.second->to);
    });

    bool crossed = false;
    for (const auto& [cost, exit] : exits) {
      Task leg_task = task;
      leg_task.source = current;
      leg_task.destination = exit->from;
      const auto leg = route(inside, leg_task, weights, options);
      if (!leg) continue;
      append_leg(*leg);
      path.push_back(exit->to);
      current = exit->to;
      crossed = true;
      break;
    }
    if (!crossed) return std::nullopt;
  }

  Task last_task = task;
  last_task.source = current;
  const auto last = route(cluster_graph(destination_cluster), last_task, weights, options);
  if (!last) return std::nullopt;
  append_leg(*last);

  result.hop_costs.reserve(path.size() - 1);
  double total = 0.0;
  for (std::size_t i = 1; i < path.size(); ++i) {
    const Link* link = graph.find_link(path[i - 1], path[i]);
    const double c =
        compute_cost(task, graph.node(path[i - 1]), graph.node(path[i]), *link, weights).total;
    result.hop_costs.push_back(c);
    total += c;
  }
  result.total_cost = total;
  result.path = std::move(path);
  return result;
}

}  // namespace apbda
