#include "apbda/cost.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "apbda/errors.hpp"

namespace apbda {

namespace {

void require_finite(double v, const char* what, AgentId id) {
  if (!std::isfinite(v)) {
    throw InvalidMetric(std::string(what) + " of " + std::to_string(id) + " is not finite");
  }
}

}  // namespace

CostBreakdown compute_cost(const Task& task, const AgentNode& from, const AgentNode& to,
                           const Link& link, const WeightVector& weights) {
  if (link.from != from.id || link.to != to.id) {
    throw std::invalid_argument("link " + std::to_string(link.from) + "->" +
                                std::to_string(link.to) + " does not join " +
                                std::to_string(from.id) + "->" + std::to_string(to.id));
  }
  if (!(to.capability > 0.0)) {
    throw InvalidMetric("capability of node " + std::to_string(to.id) + " must be > 0");
  }
  if (!(to.model_sophistication > 0.0)) {
    throw InvalidMetric("model_sophistication of node " + std::to_string(to.id) + " must be > 0");
  }
  require_finite(to.capability, "capability", to.id);
  require_finite(to.model_sophistication, "model_sophistication", to.id);
  require_finite(to.availability, "availability", to.id);
  require_finite(to.reliability, "reliability", to.id);
  require_finite(to.load_factor, "load_factor", to.id);
  require_finite(link.bandwidth, "bandwidth into node", to.id);
  require_finite(link.latency, "latency into node", to.id);
  require_finite(task.complexity, "task complexity for node", to.id);
  require_finite(task.priority, "task priority for node", to.id);

  const double availability = std::max(to.availability, kEpsDiv);
  const double reliability = std::max(to.reliability, kEpsDiv);
  const double bandwidth = std::max(link.bandwidth, kEpsDiv);
  const double t = task.complexity;
  const double p = task.priority;

  const std::array<double, WeightVector::kSize> raw = {
      t / to.capability,
      p / availability,
      p / bandwidth,
      p * link.latency,
      to.load_factor / to.capability,
      1.0 / to.model_sophistication,
      1.0 / reliability,
  };

  CostBreakdown out;
  double total = 0.0;
  for (std::size_t i = 0; i < WeightVector::kSize; ++i) {
    const double weighted = weights[i] * raw[i];
    out.terms[i] = CostTerm{kCostTermNames[i], raw[i], weighted};
    total += weighted;
  }
  out.total = total;
  return out;
}

CostMatrix cost_matrix(const AgentGraph& graph, const Task& task, const WeightVector& weights) {
  CostMatrix out;
  for (const Link& l : graph.links()) {
    out.emplace(std::make_pair(l.from, l.to),
                compute_cost(task, graph.node(l.from), graph.node(l.to), l, weights).total);
  }
  return out;
}

}  // namespace apbda
