#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "apbda/model.hpp"

namespace apbda {

/// Pruning thresholds applied before routing.
struct FilterPolicy {
  std::optional<double> max_latency;       // drop links with L above this
  std::optional<double> min_reliability;   // drop agents with R below this
  std::optional<double> min_availability;  // drop agents with A below this
  bool enabled = true;

  /// Threshold range violations; empty when the policy is usable.
  std::vector<std::string> violations() const;
};

/// Exponentially weighted moving averages of the filtered metrics, kept by
/// the simulator so that "consistently high" and "persistently low" have a
/// concrete meaning.
class MetricHistory {
 public:
  explicit MetricHistory(double decay = 0.9) : decay_(decay) {}

  double decay() const { return decay_; }

  /// Seeds every node and link average with its current value.
  void reset(const AgentGraph& graph);

  void observe_latency(AgentId from, AgentId to, double latency);
  void observe_reliability(AgentId id, double success);  // success in [0, 1]
  void observe_availability(AgentId id, double availability);

  std::optional<double> latency(AgentId from, AgentId to) const;
  std::optional<double> reliability(AgentId id) const;
  std::optional<double> availability(AgentId id) const;

 private:
  static void blend(std::map<AgentId, double>& table, AgentId id, double value, double decay);

  double decay_;
  std::map<std::pair<AgentId, AgentId>, double> latency_;
  std::map<AgentId, double> reliability_;
  std::map<AgentId, double> availability_;
};

/// Subgraph with filtered agents (and their incident links) and filtered
/// links removed. A metric trips its threshold only when the current value
/// violates it and, if `history` tracks that metric, its moving average
/// violates it too. The task's source and destination always survive. With
/// `enabled == false` or no thresholds the input is returned unchanged.
AgentGraph apply_filter(const AgentGraph& graph, const FilterPolicy& policy, const Task& task,
                        const MetricHistory* history = nullptr);

}  // namespace apbda
