#pragma once

#include <map>
#include <optional>
#include <vector>

#include "apbda/model.hpp"

namespace apbda {

/// Deliberate defects for mutation checks of the verification tooling.
/// Never enabled outside tests and `apbda verify --fault-inject`.
enum class RouterFault {
  kNone,
  /// Extract the highest-cost frontier entry first (ties: higher id).
  kReverseFrontierOrder,
};

struct RouterOptions {
  RouterFault fault = RouterFault::kNone;
};

/// Minimum-cost route from task.source to task.destination under
/// compute_cost. Returns std::nullopt when the destination is unreachable.
///
/// Frontier ties go to the lower node id; an equal-cost alternative never
/// replaces an existing predecessor. The search stops as soon as the
/// destination is extracted. Throws UnknownNode for absent endpoints and
/// propagates InvalidMetric.
std::optional<RouteResult> route(const AgentGraph& graph, const Task& task,
                                 const WeightVector& weights, const RouterOptions& options = {});

using PredecessorMap = std::map<AgentId, AgentId>;

/// Walks `predecessor` back from `destination` to `source` and returns the
/// forward path. Throws BrokenChain if the walk dead-ends or cycles.
std::vector<AgentId> reconstruct_path(const PredecessorMap& predecessor, AgentId source,
                                      AgentId destination);

}  // namespace apbda
