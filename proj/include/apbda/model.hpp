#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace apbda {

using AgentId = std::int32_t;
using TaskId = std::int64_t;
using Tick = std::int64_t;

/// Floor applied to availability, reliability and bandwidth before they are
/// used as divisors.
inline constexpr double kEpsDiv = 1e-6;

/// A routing vertex: one simulated agent and its current metrics.
struct AgentNode {
  AgentId id = 0;
  double capability = 1.0;            // C, > 0
  double availability = 1.0;          // A, (0, 1]
  double load_factor = 0.0;           // F, >= 0
  double model_sophistication = 1.0;  // M, > 0
  double reliability = 1.0;           // R, (0, 1]

  bool operator==(const AgentNode&) const = default;
};

/// Directed link from one agent to another.
struct Link {
  AgentId from = 0;
  AgentId to = 0;
  double bandwidth = 1.0;  // B, > 0
  double latency = 0.0;    // L, >= 0 (ms; ticks inside the simulator)

  bool operator==(const Link&) const = default;
};

/// Directed agent graph. Out-links of each node are kept sorted by target id
/// so every traversal is deterministic.
///
/// The container does not enforce the model invariants on insertion (except
/// for unique node ids); use validate_graph() to check them.
class AgentGraph {
 public:
  /// Inserts a node. Throws InvalidParams if the id is already present.
  void add_node(const AgentNode& node);

  /// Replaces the metrics of an existing node. Throws UnknownNode.
  void update_node(const AgentNode& node);

  /// Appends a link. Duplicates and dangling endpoints are accepted and
  /// reported by validate_graph().
  void add_link(const Link& link);

  bool contains(AgentId id) const { return nodes_.count(id) != 0; }

  /// Throws UnknownNode.
  const AgentNode& node(AgentId id) const;

  const std::map<AgentId, AgentNode>& nodes() const { return nodes_; }

  /// Out-links of `id`, sorted by target. Empty for unknown ids.
  std::span<const Link> out_links(AgentId id) const;

  /// First link from -> to, or nullptr.
  const Link* find_link(AgentId from, AgentId to) const;

  /// All links ordered by (from, to).
  std::vector<Link> links() const;

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t link_count() const { return link_count_; }

  /// Ids in ascending order.
  std::vector<AgentId> node_ids() const;

  /// Subgraph on `keep` (ids not in the graph are ignored) with every link
  /// whose endpoints both survive.
  AgentGraph induced(std::span<const AgentId> keep) const;

  bool operator==(const AgentGraph&) const = default;

 private:
  std::map<AgentId, AgentNode> nodes_;
  std::map<AgentId, std::vector<Link>> adjacency_;
  std::size_t link_count_ = 0;
};

/// One routing request.
struct Task {
  TaskId id = 0;
  double complexity = 1.0;  // T, > 0
  double priority = 1.0;    // P, > 0
  AgentId source = 0;
  AgentId destination = 0;
  Tick submit_time = 0;

  bool operator==(const Task&) const = default;
};

/// Coefficients w1..w7 of the edge cost, stored zero-based.
struct WeightVector {
  static constexpr std::size_t kSize = 7;
  std::array<double, kSize> w{};

  static WeightVector uniform(double value = 1.0) {
    WeightVector out;
    out.w.fill(value);
    return out;
  }

  double& operator[](std::size_t i) { return w[i]; }
  double operator[](std::size_t i) const { return w[i]; }

  /// All components finite and >= 0, at least one > 0.
  bool valid() const;

  bool operator==(const WeightVector&) const = default;
};

/// A found route and the search effort that produced it.
struct RouteResult {
  std::vector<AgentId> path;      // source first, destination last
  std::vector<double> hop_costs;  // path.size() - 1 entries
  double total_cost = 0.0;
  std::size_t nodes_expanded = 0;
  std::size_t edges_relaxed = 0;
};

/// Human-readable descriptions of every broken invariant. Empty iff the graph
/// is valid.
std::vector<std::string> validate_graph(const AgentGraph& graph);

/// Per-node invariant check shared by validate_graph and scenario loading.
std::vector<std::string> validate_node(const AgentNode& node);
std::vector<std::string> validate_link(const Link& link);
std::vector<std::string> validate_task(const Task& task, const AgentGraph& graph);

}  // namespace apbda
