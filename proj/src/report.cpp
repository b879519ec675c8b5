#include "apbda/report.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "apbda/scenario.hpp"

namespace apbda {

namespace {

using nlohmann::json;

json weights_json(const WeightVector& w) { return json(w.w); }

json outcome_json(const TaskOutcome& o) {
  return json{
      {"type", "task_outcome"},
      {"task_id", o.task_id},
      {"complexity", o.complexity},
      {"priority", o.priority},
      {"source", o.source},
      {"destination", o.destination},
      {"path", o.path},
      {"dispatch_tick", o.dispatch_tick},
      {"completion_tick", o.completion_tick},
      {"completion_time", o.completion_time},
      {"succeeded", o.succeeded},
      {"failure_node", o.failure_node ? json(*o.failure_node) : json(nullptr)},
      {"route_cost", o.route_cost},
      {"hops_traversed", o.hops_traversed},
      {"latency_traversed", o.latency_traversed},
  };
}

json window_json(const WindowRecord& w) {
  json action = nullptr;
  if (w.action) {
    action = json{{"index", w.action->index + 1}, {"direction", w.action->direction}, {"step", w.action->step}};
  }
  return json{
      {"type", "reward"},
      {"window_id", w.reward.window_id},
      {"reward", w.reward.reward},
      {"hp_completion_term", w.reward.components.hp_completion},
      {"fairness_term", w.reward.components.fairness},
      {"reliability_term", w.reward.components.reliability},
      {"first_outcome", w.first_outcome},
      {"last_outcome", w.last_outcome},
      {"state",
       {{"avg_latency", w.state.avg_latency},
        {"load_mean", w.state.load_mean},
        {"load_stddev", w.state.load_stddev},
        {"recent_reliability_incidents", w.state.reliability_incidents},
        {"priority_profile", w.state.priority_profile}}},
      {"agent_loads", w.agent_loads},
      {"weights_used", weights_json(w.weights_used)},
      {"weights_next", weights_json(w.weights_next)},
      {"action", action},
  };
}

}  // namespace

PolicyEcho describe_policy(const Scenario& s) {
  PolicyEcho p;
  p["router"] = s.hierarchy.enabled ? "hierarchical" : "flat";
  if (s.hierarchy.enabled) {
    p["hierarchy.k"] = std::to_string(s.hierarchy.k);
    p["hierarchy.seed"] = std::to_string(s.hierarchy.seed);
  }
  p["filter"] = s.filter.enabled ? "on" : "off";
  if (s.filter.enabled) {
    if (s.filter.max_latency) p["filter.max_latency"] = format_number(*s.filter.max_latency);
    if (s.filter.min_reliability) p["filter.min_reliability"] = format_number(*s.filter.min_reliability);
    if (s.filter.min_availability) p["filter.min_availability"] = format_number(*s.filter.min_availability);
  }
  p["rl"] = s.rl.enabled ? "on" : "off";
  return p;
}

std::string records_jsonl(const RunReport& report) {
  std::ostringstream os;
  std::size_t next_window = 0;
  for (std::size_t i = 0; i < report.outcomes.size(); ++i) {
    os << outcome_json(report.outcomes[i]).dump() << '\n';
    while (next_window < report.windows.size() && report.windows[next_window].last_outcome == i) {
      os << window_json(report.windows[next_window]).dump() << '\n';
      ++next_window;
    }
  }
  return os.str();
}

CompletionStats completion_stats(std::vector<double> samples) {
  CompletionStats s;
  s.count = samples.size();
  if (samples.empty()) return s;
  std::sort(samples.begin(), samples.end());
  double sum = 0.0;
  for (double v : samples) sum += v;
  s.mean = sum / static_cast<double>(samples.size());
  auto rank = [&](double pct) {
    const auto n = static_cast<double>(samples.size());
    auto idx = static_cast<std::size_t>(std::ceil(pct / 100.0 * n));
    idx = std::clamp<std::size_t>(idx, 1, samples.size());
    return samples[idx - 1];
  };
  s.p50 = rank(50);
  s.p90 = rank(90);
  s.p99 = rank(99);
  return s;
}

namespace {

struct Totals {
  std::size_t succeeded = 0;
  std::size_t failed = 0;
  std::size_t unreachable = 0;
  CompletionStats all;
  CompletionStats high;
  double mean_reward = 0.0;
};

Totals totals(const RunReport& report, const Scenario& scenario) {
  Totals t;
  std::vector<double> times;
  std::vector<double> high;
  for (const TaskOutcome& o : report.outcomes) {
    if (o.succeeded) {
      ++t.succeeded;
      times.push_back(static_cast<double>(o.completion_time));
      if (o.priority >= scenario.rl.high_priority_threshold) {
        high.push_back(static_cast<double>(o.completion_time));
      }
    } else if (o.path.empty()) {
      ++t.unreachable;
    } else {
      ++t.failed;
    }
  }
  t.all = completion_stats(std::move(times));
  t.high = completion_stats(std::move(high));
  double sum = 0.0;
  for (const auto& w : report.windows) sum += w.reward.reward;
  t.mean_reward = report.windows.empty() ? 0.0 : sum / static_cast<double>(report.windows.size());
  return t;
}

json stats_json(const CompletionStats& s) {
  return json{{"count", s.count}, {"mean", s.mean}, {"p50", s.p50}, {"p90", s.p90}, {"p99", s.p99}};
}

}  // namespace

std::string summary_json(const RunReport& report, const Scenario& scenario, const PolicyEcho& policy) {
  const Totals t = totals(report, scenario);
  json ratios = {{"count", report.hierarchy_ratios.size()}, {"min", 0.0}, {"mean", 0.0}, {"max", 0.0}};
  if (!report.hierarchy_ratios.empty()) {
    const auto [lo, hi] = std::minmax_element(report.hierarchy_ratios.begin(), report.hierarchy_ratios.end());
    double sum = 0.0;
    for (double r : report.hierarchy_ratios) sum += r;
    ratios["min"] = *lo;
    ratios["max"] = *hi;
    ratios["mean"] = sum / static_cast<double>(report.hierarchy_ratios.size());
  }
  json doc = {
      {"policy", policy},
      {"tasks", report.outcomes.size()},
      {"succeeded", t.succeeded},
      {"failed", t.failed},
      {"unreachable", t.unreachable},
      {"completion_time", stats_json(t.all)},
      {"high_priority_completion_time", stats_json(t.high)},
      {"windows", report.windows.size()},
      {"mean_reward", t.mean_reward},
      {"initial_weights", weights_json(report.initial_weights)},
      {"final_weights", weights_json(report.final_weights)},
      {"hierarchy_ratio", ratios},
  };
  return doc.dump(2) + "\n";
}

std::string summary_text(const RunReport& report, const Scenario& scenario, const PolicyEcho& policy) {
  const Totals t = totals(report, scenario);
  std::ostringstream os;
  os << "# policy:";
  for (const auto& [key, value] : policy) os << ' ' << key << '=' << value;
  os << '\n';
  os << "tasks: " << report.outcomes.size() << " (succeeded " << t.succeeded << ", failed " << t.failed
     << ", unreachable " << t.unreachable << ")\n";
  if (t.all.count > 0) {
    os << "completion_time: mean " << format_number(t.all.mean) << ", p50 " << format_number(t.all.p50)
       << ", p90 " << format_number(t.all.p90) << ", p99 " << format_number(t.all.p99) << '\n';
  }
  if (t.high.count > 0) {
    os << "high_priority_completion_time: mean " << format_number(t.high.mean) << '\n';
  }
  if (!report.windows.empty()) {
    os << "windows: " << report.windows.size() << ", mean_reward " << format_number(t.mean_reward) << '\n';
  }
  os << "final_weights:";
  for (double w : report.final_weights.w) os << ' ' << format_number(w);
  os << '\n';
  return os.str();
}

std::string qtable_json(const QTable& q) {
  json labels = json::array();
  for (std::size_t a = 0; a < kActionCount; ++a) {
    const RLAction action = action_from_id(a, 0.0);
    labels.push_back("w" + std::to_string(action.index + 1) + (action.direction > 0 ? "+" : "-"));
  }
  json rows = json::array();
  for (std::size_t s = 0; s < kStateCount; ++s) {
    json row = json::array();
    for (std::size_t a = 0; a < kActionCount; ++a) row.push_back(q.at(s, a));
    rows.push_back(row);
  }
  return json{{"states", kStateCount}, {"actions", labels}, {"values", rows}}.dump(2) + "\n";
}

}  // namespace apbda
