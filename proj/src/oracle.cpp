#include "apbda/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "apbda/cost.hpp"
#include "apbda/errors.hpp"
#include "apbda/random.hpp"

namespace apbda {

namespace {

struct Search {
  const AgentGraph& graph;
  const Task& task;
  const WeightVector& weights;
  std::vector<AgentId> stack;
  std::vector<double> stack_costs;
  std::optional<RouteResult> best;
  std::size_t visits = 0;
  std::size_t edges = 0;

  bool on_stack(AgentId id) const {
    for (AgentId s : stack) {
      if (s == id) return true;
    }
    return false;
  }

  // Scores the current stack from scratch: a fresh lookup of every node and
  // link, summed left to right.
  void score() {
    std::vector<double> hops;
    double total = 0.0;
    for (std::size_t i = 1; i < stack.size(); ++i) {
      const AgentNode from = graph.node(stack[i - 1]);
      const AgentNode to = graph.node(stack[i]);
      const Link link = *graph.find_link(from.id, to.id);
      const double c = compute_cost(task, from, to, link, weights).total;
      hops.push_back(c);
      total += c;
    }
    // Paths are generated in lexicographic order, so only a strictly cheaper
    // path may replace the incumbent.
    if (!best || total < best->total_cost) {
      best = RouteResult{stack, std::move(hops), total, 0, 0};
    }
  }

  void dfs(AgentId at) {
    ++visits;
    if (at == task.destination) {
      score();
      return;
    }
    for (const Link& l : graph.out_links(at)) {
      ++edges;
      if (on_stack(l.to) || !graph.contains(l.to)) continue;
      stack.push_back(l.to);
      dfs(l.to);
      stack.pop_back();
    }
  }
};

void check_range(const Range& r, const char* name, bool allow_zero) {
  const bool ok = allow_zero ? (r.lo >= 0.0) : (r.lo > 0.0);
  if (!ok || r.hi < r.lo) {
    throw InvalidParams(std::string("invalid range for ") + name);
  }
}

}  // namespace

std::optional<RouteResult> exhaustive_best_path(const AgentGraph& graph, const Task& task,
                                                const WeightVector& weights) {
  if (graph.node_count() > kOracleNodeGuard) {
    throw TooLarge("exhaustive search limited to " + std::to_string(kOracleNodeGuard) +
                   " nodes, graph has " + std::to_string(graph.node_count()));
  }
  if (!graph.contains(task.source)) throw UnknownNode("unknown source " + std::to_string(task.source));
  if (!graph.contains(task.destination)) {
    throw UnknownNode("unknown destination " + std::to_string(task.destination));
  }
  Search search{graph, task, weights, {task.source}, {}, std::nullopt};
  search.dfs(task.source);
  if (search.best) {
    search.best->nodes_expanded = search.visits;
    search.best->edges_relaxed = search.edges;
  }
  return search.best;
}

Instance random_instance(std::size_t node_count, double density, const MetricRanges& ranges,
                         std::uint64_t seed) {
  if (node_count < 2) throw InvalidParams("node count must be >= 2");
  if (!(density > 0.0 && density <= 1.0)) throw InvalidParams("density must be in (0, 1]");
  check_range(ranges.capability, "capability", false);
  check_range(ranges.availability, "availability", false);
  check_range(ranges.load_factor, "load_factor", true);
  check_range(ranges.model_sophistication, "model_sophistication", false);
  check_range(ranges.reliability, "reliability", false);
  check_range(ranges.bandwidth, "bandwidth", false);
  check_range(ranges.latency, "latency", true);
  check_range(ranges.complexity, "complexity", false);
  check_range(ranges.priority, "priority", false);
  check_range(ranges.weight, "weight", false);
  if (ranges.availability.hi > 1.0 || ranges.reliability.hi > 1.0) {
    throw InvalidParams("availability and reliability ranges must lie within (0, 1]");
  }

  RandomStream rng(seed);
  auto draw = [&](const Range& r) { return rng.uniform(r.lo, r.hi); };

  Instance out;
  for (std::size_t i = 0; i < node_count; ++i) {
    AgentNode node;
    node.id = static_cast<AgentId>(i);
    node.capability = draw(ranges.capability);
    node.availability = draw(ranges.availability);
    node.load_factor = draw(ranges.load_factor);
    node.model_sophistication = draw(ranges.model_sophistication);
    node.reliability = draw(ranges.reliability);
    out.graph.add_node(node);
  }
  for (std::size_t i = 0; i < node_count; ++i) {
    for (std::size_t j = 0; j < node_count; ++j) {
      if (i == j) continue;
      // Always draw so that the metric stream does not depend on density.
      const double gate = rng.uniform01();
      const double bandwidth = draw(ranges.bandwidth);
      const double latency = draw(ranges.latency);
      if (density >= 1.0 || gate < density) {
        out.graph.add_link(
            Link{static_cast<AgentId>(i), static_cast<AgentId>(j), bandwidth, latency});
      }
    }
  }

  out.task.id = 0;
  out.task.complexity = draw(ranges.complexity);
  out.task.priority = draw(ranges.priority);
  out.task.source = static_cast<AgentId>(rng.uniform_index(node_count));
  auto dest = static_cast<AgentId>(rng.uniform_index(node_count - 1));
  if (dest >= out.task.source) ++dest;
  out.task.destination = dest;
  for (double& w : out.weights.w) w = draw(ranges.weight);
  return out;
}


bool close_relative(double a, double b, double tol) {
  const double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= tol * scale;
}

std::uint64_t verify_instance_seed(std::uint64_t batch_seed, std::size_t index) {
  return RandomStream::mix(batch_seed * 0x100000001b3ULL + index);
}

VerifyReport verify_batch(std::size_t max_nodes, std::size_t count, std::uint64_t seed,
                          const RouterOptions& options) {
  if (max_nodes > kOracleNodeGuard) {
    throw TooLarge("verification limited to " + std::to_string(kOracleNodeGuard) + " nodes");
  }
  if (max_nodes < 2) throw InvalidParams("verification needs at least 2 nodes");
  VerifyReport report;
  const MetricRanges ranges;
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t nodes = 2 + (i / kVerifyDensities.size()) % (max_nodes - 1);
    const double density = kVerifyDensities[i % kVerifyDensities.size()];
    const std::uint64_t instance_seed = verify_instance_seed(seed, i);
    const Instance inst = random_instance(nodes, density, ranges, instance_seed);
    const auto routed = route(inst.graph, inst.task, inst.weights, options);
    const auto best = exhaustive_best_path(inst.graph, inst.task, inst.weights);

    std::string detail;
    if (routed.has_value() != best.has_value()) {
      detail = std::string("reachability disagrees: router ") + (routed ? "found a path" : "unreachable") +
               ", oracle " + (best ? "found a path" : "unreachable");
    } else if (routed) {
      double rescored = 0.0;
      for (std::size_t h = 1; h < routed->path.size(); ++h) {
        const Link* link = inst.graph.find_link(routed->path[h - 1], routed->path[h]);
        if (!link) {
          detail = "routed path uses a missing link";
          break;
        }
        rescored += compute_cost(inst.task, inst.graph.node(link->from), inst.graph.node(link->to),
                                 *link, inst.weights)
                        .total;
      }
      if (detail.empty() && !close_relative(routed->total_cost, best->total_cost, 1e-9)) {
        detail = "total cost " + std::to_string(routed->total_cost) + " vs oracle " +
                 std::to_string(best->total_cost);
      } else if (detail.empty() && !close_relative(rescored, best->total_cost, 1e-9)) {
        detail = "routed path re-scores to " + std::to_string(rescored) + " vs oracle " +
                 std::to_string(best->total_cost);
      }
    }
    if (detail.empty()) {
      ++report.passed;
    } else {
      report.failures.push_back(VerifyFailure{i, instance_seed, nodes, density, detail});
    }
  }
  return report;
}

}  // namespace apbda
