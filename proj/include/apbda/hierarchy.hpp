#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "apbda/model.hpp"
#include "apbda/router.hpp"

namespace apbda {

using ClusterId = AgentId;

struct Cluster {
  ClusterId id = 0;
  std::vector<AgentId> members;  // ascending
  AgentId head = 0;

  bool operator==(const Cluster&) const = default;
};

/// Partition of the agents into clusters, ordered by head id; cluster ids are
/// the positions 0..k-1.
struct Clustering {
  std::vector<Cluster> clusters;
  std::map<AgentId, ClusterId> membership;

  ClusterId cluster_of(AgentId id) const;  // throws UnknownNode

  bool operator==(const Clustering&) const = default;
};

/// Partition violations against `graph` (disjoint, covering, heads inside
/// their own cluster). Empty when valid.
std::vector<std::string> validate_clustering(const Clustering& clustering, const AgentGraph& graph);

/// Seeded k-medoids over latency shortest-path distance; heads are the
/// medoids. Pairs unreachable in both directions fall back to an undirected
/// hop count placed above every latency distance. Throws InvalidK unless
/// 1 <= k <= node count.
Clustering build_clustering(const AgentGraph& graph, std::size_t k, std::uint64_t seed);

/// Drops members absent from `graph`; a cluster whose head vanished is headed
/// by its lowest surviving id, and emptied clusters are removed.
Clustering restrict_clustering(const Clustering& clustering, const AgentGraph& graph);

/// Cluster-level graph. Super-node i carries the metrics of cluster i's head;
/// super-edge X->Y has the minimum latency and maximum bandwidth over the
/// original links crossing from X to Y.
struct SuperGraph {
  AgentGraph graph;
  std::map<std::pair<ClusterId, ClusterId>, std::vector<Link>> crossing;
};

SuperGraph build_supergraph(const AgentGraph& graph, const Clustering& clustering);

/// Two-level route: the cluster sequence comes from route() on the super-graph
/// and each cluster is then crossed with route() on its induced subgraph,
/// leaving through the cheapest reachable crossing link. Endpoints in one
/// cluster are routed on that cluster alone. hop_costs and total_cost are
/// recomputed from the real links; nodes_expanded and edges_relaxed add up
/// all searches. Returns std::nullopt when no expansion exists.
std::optional<RouteResult> route_hierarchical(const AgentGraph& graph, const Clustering& clustering,
                                              const Task& task, const WeightVector& weights,
                                              const RouterOptions& options = {});

}  // namespace apbda
