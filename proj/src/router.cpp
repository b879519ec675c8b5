#include "apbda/router.hpp"

#include <algorithm>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "apbda/cost.hpp"
#include "apbda/errors.hpp"

namespace apbda {

namespace {

constexpr std::size_t kAbsent = std::numeric_limits<std::size_t>::max();

// Binary min-heap over dense slot indices with decrease-key. Keys compare by
// (cost, node id); `reversed` flips the order for fault injection.
class FrontierQueue {
 public:
  FrontierQueue(const std::vector<double>& cost, const std::vector<AgentId>& ids, bool reversed)
      : cost_(cost), ids_(ids), position_(ids.size(), kAbsent), reversed_(reversed) {}

  bool empty() const { return heap_.empty(); }
  bool contains(std::size_t slot) const { return position_[slot] != kAbsent; }

  void insert(std::size_t slot) {
    position_[slot] = heap_.size();
    heap_.push_back(slot);
    sift_up(heap_.size() - 1);
  }

  // Call after cost_[slot] was lowered.
  void decrease_key(std::size_t slot) {
    if (reversed_) {
      sift_down(position_[slot]);
    } else {
      sift_up(position_[slot]);
    }
  }

  std::size_t extract_min() {
    const std::size_t top = heap_.front();
    swap_at(0, heap_.size() - 1);
    heap_.pop_back();
    position_[top] = kAbsent;
    if (!heap_.empty()) sift_down(0);
    return top;
  }

 private:
  bool before(std::size_t a, std::size_t b) const {
    const auto ka = std::make_pair(cost_[a], ids_[a]);
    const auto kb = std::make_pair(cost_[b], ids_[b]);
    return reversed_ ? kb < ka : ka < kb;
  }

  void swap_at(std::size_t i, std::size_t j) {
    std::swap(heap_[i], heap_[j]);
    position_[heap_[i]] = i;
    position_[heap_[j]] = j;
  }

  void sift_up(std::size_t i) {
    while (i > 0) {
      const std::size_t parent = (i - 1) / 2;
      if (!before(heap_[i], heap_[parent])) break;
      swap_at(i, parent);
      i = parent;
    }
  }

  void sift_down(std::size_t i) {
    for (;;) {
      const std::size_t left = 2 * i + 1;
      const std::size_t right = left + 1;
      std::size_t best = i;
      if (left < heap_.size() && before(heap_[left], heap_[best])) best = left;
      if (right < heap_.size() && before(heap_[right], heap_[best])) best = right;
      if (best == i) return;
      swap_at(i, best);
      i = best;
    }
  }

  const std::vector<double>& cost_;
  const std::vector<AgentId>& ids_;
  std::vector<std::size_t> heap_;
  std::vector<std::size_t> position_;
  bool reversed_;
};

}  // namespace

std::optional<RouteResult> route(const AgentGraph& graph, const Task& task,
                                 const WeightVector& weights, const RouterOptions& options) {
  if (!graph.contains(task.source)) {
    throw UnknownNode("unknown source node " + std::to_string(task.source));
  }
  if (!graph.contains(task.destination)) {
    throw UnknownNode("unknown destination node " + std::to_string(task.destination));
  }

  // Dense slots in ascending id order.
  const std::vector<AgentId> ids = graph.node_ids();
  const std::vector<const AgentNode*> nodes = [&] {
    std::vector<const AgentNode*> out;
    out.reserve(ids.size());
    for (const auto& [id, node] : graph.nodes()) out.push_back(&node);
    return out;
  }();
  auto slot_of = [&](AgentId id) {
    return static_cast<std::size_t>(std::lower_bound(ids.begin(), ids.end(), id) - ids.begin());
  };

  const std::size_t n = ids.size();
  std::vector<double> total_cost(n, std::numeric_limits<double>::infinity());
  std::vector<std::size_t> predecessor(n, kAbsent);
  std::vector<double> arrival_cost(n, 0.0);
  std::vector<bool> settled(n, false);

  const std::size_t source = slot_of(task.source);
  const std::size_t destination = slot_of(task.destination);
  total_cost[source] = 0.0;

  FrontierQueue frontier(total_cost, ids, options.fault == RouterFault::kReverseFrontierOrder);
  frontier.insert(source);

  RouteResult result;
  while (!frontier.empty()) {
    const std::size_t u = frontier.extract_min();
    if (!settled[u]) {
      settled[u] = true;
      ++result.nodes_expanded;
    }
    if (u == destination) break;

    for (const Link& link : graph.out_links(ids[u])) {
      const std::size_t v = slot_of(link.to);
      if (v >= n || ids[v] != link.to) {
        throw UnknownNode("link " + std::to_string(link.from) + "->" + std::to_string(link.to) +
                          " targets an unknown node");
      }
      ++result.edges_relaxed;
      const double cost = compute_cost(task, *nodes[u], *nodes[v], link, weights).total;
      const double alt = total_cost[u] + cost;
      if (alt < total_cost[v]) {
        total_cost[v] = alt;
        predecessor[v] = u;
        arrival_cost[v] = cost;
        if (frontier.contains(v)) {
          frontier.decrease_key(v);
        } else {
          frontier.insert(v);
        }
      }
    }
  }

  if (!settled[destination]) return std::nullopt;

  std::vector<std::size_t> chain;
  for (std::size_t at = destination; at != source; at = predecessor[at]) {
    if (at == kAbsent || chain.size() > n) throw BrokenChain("predecessor chain does not reach source");
    chain.push_back(at);
  }
  chain.push_back(source);
  std::reverse(chain.begin(), chain.end());

  result.path.reserve(chain.size());
  for (std::size_t slot : chain) result.path.push_back(ids[slot]);
  result.hop_costs.reserve(chain.size() - 1);
  for (std::size_t i = 1; i < chain.size(); ++i) result.hop_costs.push_back(arrival_cost[chain[i]]);
  result.total_cost = total_cost[destination];
  return result;
}

std::vector<AgentId> reconstruct_path(const PredecessorMap& predecessor, AgentId source,
                                      AgentId destination) {
  std::vector<AgentId> path{destination};
  AgentId at = destination;
  while (at != source) {
    auto it = predecessor.find(at);
    if (it == predecessor.end()) {
      throw BrokenChain("no predecessor recorded for node " + std::to_string(at));
    }
    if (path.size() > predecessor.size()) {
      throw BrokenChain("predecessor chain from " + std::to_string(destination) + " cycles");
    }
    at = it->second;
    path.push_back(at);
  }
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace apbda
