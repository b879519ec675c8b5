#pragma once

#include <cmath>
#include <initializer_list>

#include "apbda/model.hpp"

namespace apbda::test {

inline AgentNode make_node(AgentId id, double capability = 1.0, double availability = 1.0,
                           double load = 0.0, double sophistication = 1.0, double reliability = 1.0) {
  return AgentNode{id, capability, availability, load, sophistication, reliability};
}

/// Nodes 0..n-1 with default metrics.
inline AgentGraph plain_graph(int n) {
  AgentGraph g;
  for (int i = 0; i < n; ++i) g.add_node(make_node(i));
  return g;
}

inline Task make_task(AgentId source, AgentId destination, double complexity = 1.0,
                      double priority = 1.0) {
  Task t;
  t.source = source;
  t.destination = destination;
  t.complexity = complexity;
  t.priority = priority;
  return t;
}

/// Weight vector with only w4 (priority * latency) set, so edge cost = P * L.
inline WeightVector latency_only() {
  WeightVector w;
  w[3] = 1.0;
  return w;
}

inline bool rel_close(double a, double b, double tol) {
  const double scale = std::fmax(1.0, std::fmax(std::fabs(a), std::fabs(b)));
  return std::fabs(a - b) <= tol * scale;
}

}  // namespace apbda::test
