#pragma once

#include <array>
#include <map>
#include <string_view>
#include <utility>

#include "apbda/model.hpp"

namespace apbda {

/// One summand of the edge cost.
struct CostTerm {
  std::string_view name;
  double raw = 0.0;       // metric expression before weighting
  double weighted = 0.0;  // w_i * raw
};

/// Term-by-term cost of one edge for one task. `total` is the left-to-right
/// sum of the weighted terms in the order of `terms`.
struct CostBreakdown {
  std::array<CostTerm, WeightVector::kSize> terms{};
  double total = 0.0;
};

/// Names of the seven terms, in evaluation order.
inline constexpr std::array<std::string_view, WeightVector::kSize> kCostTermNames = {
    "complexity/capability",  // T / C_j
    "priority/availability",  // P / A_j
    "priority/bandwidth",     // P / B_ij
    "priority*latency",       // P * L_ij
    "load/capability",        // F_j / C_j
    "1/sophistication",       // 1 / M_j
    "1/reliability",          // 1 / R_j
};

/// Cost of traversing `link` into `to` for `task`:
///
///   w1 T/C_j + w2 P/A_j + w3 P/B_ij + w4 P L_ij + w5 F_j/C_j + w6/M_j + w7/R_j
///
/// Only destination-node metrics enter the cost; `from` is checked against the
/// link but otherwise unused. Availability, reliability and bandwidth are
/// floored at kEpsDiv. Throws InvalidMetric when capability or model
/// sophistication is not strictly positive, or any input is non-finite, and
/// std::invalid_argument when the link does not join `from` to `to`.
CostBreakdown compute_cost(const Task& task, const AgentNode& from, const AgentNode& to,
                           const Link& link, const WeightVector& weights);

using CostMatrix = std::map<std::pair<AgentId, AgentId>, double>;

/// compute_cost total for every link of the graph.
CostMatrix cost_matrix(const AgentGraph& graph, const Task& task, const WeightVector& weights);

}  // namespace apbda
