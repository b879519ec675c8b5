#pragma once

#include <optional>
#include <vector>

#include "apbda/model.hpp"

namespace apbda {

/// Final record of one simulated task.
struct TaskOutcome {
  TaskId task_id = 0;
  double complexity = 0.0;
  double priority = 0.0;
  AgentId source = 0;
  AgentId destination = 0;
  std::vector<AgentId> path;  // empty when the route was unreachable
  Tick dispatch_tick = 0;
  Tick completion_tick = 0;
  Tick completion_time = 0;
  bool succeeded = false;
  std::optional<AgentId> failure_node;
  double route_cost = 0.0;
  std::size_t hops_traversed = 0;  // links actually crossed
  double latency_traversed = 0.0;  // sum of their latencies

  bool operator==(const TaskOutcome&) const = default;
};

}  // namespace apbda
