#pragma once

#include <map>
#include <string>

#include "apbda/sim.hpp"

namespace apbda {

/// Routing-policy settings echoed at the top of every summary.
using PolicyEcho = std::map<std::string, std::string>;

PolicyEcho describe_policy(const Scenario& scenario);

/// Line-delimited JSON: one "task_outcome" record per outcome in emission
/// order, and one "reward" record directly after the outcome that closed
/// each window.
std::string records_jsonl(const RunReport& report);

struct CompletionStats {
  std::size_t count = 0;
  double mean = 0.0;
  double p50 = 0.0;
  double p90 = 0.0;
  double p99 = 0.0;
};

/// Nearest-rank percentiles; all zeros for an empty sample.
CompletionStats completion_stats(std::vector<double> samples);

/// Summary document (JSON text, terminated by a newline).
std::string summary_json(const RunReport& report, const Scenario& scenario, const PolicyEcho& policy);

/// Human-readable summary for standard output.
std::string summary_text(const RunReport& report, const Scenario& scenario, const PolicyEcho& policy);

/// Q table as JSON: 81 rows of 14 action values plus action labels.
std::string qtable_json(const QTable& q);

}  // namespace apbda
