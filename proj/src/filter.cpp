#include "apbda/filter.hpp"

#include <cmath>
#include <string>

namespace apbda {

std::vector<std::string> FilterPolicy::violations() const {
  std::vector<std::string> out;
  if (max_latency && !(*max_latency > 0.0 && std::isfinite(*max_latency))) {
    out.push_back("filter.max_latency must be > 0");
  }
  if (min_reliability && !(*min_reliability > 0.0 && *min_reliability <= 1.0)) {
    out.push_back("filter.min_reliability must be in (0, 1]");
  }
  if (min_availability && !(*min_availability > 0.0 && *min_availability <= 1.0)) {
    out.push_back("filter.min_availability must be in (0, 1]");
  }
  return out;
}

void MetricHistory::reset(const AgentGraph& graph) {
  latency_.clear();
  reliability_.clear();
  availability_.clear();
  for (const auto& [id, node] : graph.nodes()) {
    reliability_[id] = node.reliability;
    availability_[id] = node.availability;
  }
  for (const Link& l : graph.links()) latency_[{l.from, l.to}] = l.latency;
}

void MetricHistory::blend(std::map<AgentId, double>& table, AgentId id, double value,
                          double decay) {
  auto [it, inserted] = table.emplace(id, value);
  if (!inserted) it->second = decay * it->second + (1.0 - decay) * value;
}

void MetricHistory::observe_latency(AgentId from, AgentId to, double latency) {
  auto [it, inserted] = latency_.emplace(std::make_pair(from, to), latency);
  if (!inserted) it->second = decay_ * it->second + (1.0 - decay_) * latency;
}

void MetricHistory::observe_reliability(AgentId id, double success) {
  blend(reliability_, id, success, decay_);
}

void MetricHistory::observe_availability(AgentId id, double availability) {
  blend(availability_, id, availability, decay_);
}

std::optional<double> MetricHistory::latency(AgentId from, AgentId to) const {
  auto it = latency_.find({from, to});
  if (it == latency_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> MetricHistory::reliability(AgentId id) const {
  auto it = reliability_.find(id);
  if (it == reliability_.end()) return std::nullopt;
  return it->second;
}

std::optional<double> MetricHistory::availability(AgentId id) const {
  auto it = availability_.find(id);
  if (it == availability_.end()) return std::nullopt;
  return it->second;
}

AgentGraph apply_filter(const AgentGraph& graph, const FilterPolicy& policy, const Task& task,
                        const MetricHistory* history) {
  if (!policy.enabled ||
      (!policy.max_latency && !policy.min_reliability && !policy.min_availability)) {
    return graph;
  }

  auto below = [](double current, std::optional<double> average, double threshold) {
    return current < threshold && (!average || *average < threshold);
  };

  AgentGraph out;
  for (const auto& [id, node] : graph.nodes()) {
    const bool endpoint = id == task.source || id == task.destination;
    bool drop = false;
    if (policy.min_reliability) {
      drop = drop || below(node.reliability, history ? history->reliability(id) : std::nullopt,
                           *policy.min_reliability);
    }
    if (policy.min_availability) {
      drop = drop || below(node.availability, history ? history->availability(id) : std::nullopt,
                           *policy.min_availability);
    }
    if (endpoint || !drop) out.add_node(node);
  }
  for (const Link& l : graph.links()) {
    if (!out.contains(l.from) || !out.contains(l.to)) continue;
    if (policy.max_latency) {
      const auto average = history ? history->latency(l.from, l.to) : std::nullopt;
      const bool high = l.latency > *policy.max_latency && (!average || *average > *policy.max_latency);
      if (high) continue;
    }
    out.add_link(l);
  }
  return out;
}

}  // namespace apbda
