#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "apbda/model.hpp"
#include "apbda/router.hpp"

namespace apbda {

/// Largest graph exhaustive_best_path accepts.
inline constexpr std::size_t kOracleNodeGuard = 10;

/// Brute-force minimum over every simple source -> destination path. Ties are
/// broken by the lexicographically smallest id sequence. nodes_expanded counts
/// DFS visits and edges_relaxed counts edges examined. Throws TooLarge above
/// kOracleNodeGuard nodes and UnknownNode for absent endpoints.
std::optional<RouteResult> exhaustive_best_path(const AgentGraph& graph, const Task& task,
                                                const WeightVector& weights);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// Draw ranges for random_instance. Every lower bound must be positive
/// (latency may start at 0).
struct MetricRanges {
  Range capability{0.5, 10.0};
  Range availability{0.05, 1.0};
  Range load_factor{0.0, 2.0};
  Range model_sophistication{0.5, 5.0};
  Range reliability{0.5, 1.0};
  Range bandwidth{0.5, 20.0};
  Range latency{0.0, 50.0};
  Range complexity{0.5, 20.0};
  Range priority{0.5, 10.0};
  Range weight{0.05, 2.0};
};

struct Instance {
  AgentGraph graph;
  Task task;
  WeightVector weights;
};

/// Random valid instance on ids 0..node_count-1. Each ordered pair (i != j)
/// carries a link with probability `density`; source and destination are a
/// distinct uniform pair. Deterministic per seed. Throws InvalidParams.
Instance random_instance(std::size_t node_count, double density, const MetricRanges& ranges,
                         std::uint64_t seed);

struct VerifyFailure {
  std::size_t instance = 0;
  std::uint64_t seed = 0;
  std::size_t node_count = 0;
  double density = 0.0;
  std::string detail;
};

struct VerifyReport {
  std::size_t passed = 0;
  std::vector<VerifyFailure> failures;
};

/// Densities cycled through by verify_batch.
inline constexpr std::array<double, 3> kVerifyDensities = {0.3, 0.6, 1.0};

/// Per-instance seed used by verify_batch for instance `index`.
std::uint64_t verify_instance_seed(std::uint64_t batch_seed, std::size_t index);

/// Compares route() against exhaustive_best_path() on `count` random
/// instances with 2..max_nodes nodes and densities cycling through
/// kVerifyDensities. An instance passes when both agree on reachability, the
/// totals match within 1e-9 relative tolerance, and the routed path re-scores
/// to the oracle total. Throws TooLarge when max_nodes exceeds the guard.
VerifyReport verify_batch(std::size_t max_nodes, std::size_t count, std::uint64_t seed,
                          const RouterOptions& options = {});

/// |a - b| <= tol * max(1, |a|, |b|).
bool close_relative(double a, double b, double tol);

}  // namespace apbda
