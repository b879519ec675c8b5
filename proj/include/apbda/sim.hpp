#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "apbda/filter.hpp"
#include "apbda/hierarchy.hpp"
#include "apbda/model.hpp"
#include "apbda/oracle.hpp"
#include "apbda/outcome.hpp"
#include "apbda/random.hpp"
#include "apbda/rl.hpp"

namespace apbda {

/// One segment of a cyclic arrival schedule.
struct WorkloadPhase {
  Tick duration = 1;
  double arrival_rate = 1.0;  // expected tasks per tick (Poisson)
  Range complexity{1.0, 1.0};
  Range priority{1.0, 1.0};
};

/// Task arrival process. When `phases` is non-empty the phases repeat in order
/// and override the flat rate and ranges.
struct WorkloadParams {
  double arrival_rate = 1.0;
  Range complexity{1.0, 10.0};
  Range priority{1.0, 10.0};
  std::vector<WorkloadPhase> phases;
  /// Optional endpoint restrictions; empty means every node.
  std::vector<AgentId> sources;
  std::vector<AgentId> destinations;

  std::vector<std::string> violations() const;
};

/// Poisson arrivals per tick over [0, duration), ids assigned in order.
/// Source and destination are a uniform distinct pair from the allowed sets.
/// Throws InvalidParams.
std::vector<Task> generate_workload(const WorkloadParams& params, std::span<const AgentId> nodes,
                                    Tick duration, std::uint64_t seed);

struct HierarchyConfig {
  bool enabled = false;
  std::size_t k = 1;
  std::uint64_t seed = 0;
};

struct SeedSet {
  std::uint64_t workload = 1;
  std::uint64_t failure = 2;
  std::uint64_t rl = 3;
};

struct SimConfig {
  Tick duration = 1000;
  SeedSet seeds;
  double load_quantum = 0.1;  // load added per task arriving at an agent
  double load_decay = 0.95;   // per-tick multiplicative decay of the excess
  double history_decay = 0.9;
};

struct Scenario {
  AgentGraph graph;
  std::vector<std::string> names;  // names[id]
  WeightVector weights = WeightVector::uniform();
  WorkloadParams workload;
  FilterPolicy filter{std::nullopt, std::nullopt, std::nullopt, false};
  HierarchyConfig hierarchy;
  /// Without an rl block rewards are still scored but weights stay frozen.
  RLConfig rl = [] {
    RLConfig c;
    c.enabled = false;
    return c;
  }();
  SimConfig sim;

  /// Every constraint across graph and policy blocks.
  std::vector<std::string> violations() const;
};

/// Everything learned at the end of one RL window.
struct WindowRecord {
  RewardRecord reward;
  RLState state;
  std::size_t first_outcome = 0;  // index into RunReport::outcomes
  std::size_t last_outcome = 0;   // inclusive
  std::vector<double> agent_loads;
  WeightVector weights_used;
  WeightVector weights_next;
  std::optional<RLAction> action;
};

struct RunReport {
  std::vector<TaskOutcome> outcomes;
  std::vector<WindowRecord> windows;
  WeightVector initial_weights;
  WeightVector final_weights;
  std::vector<double> hierarchy_ratios;  // hierarchical / flat route cost
  QTable q_table;
  std::size_t generated_tasks = 0;
};

/// Discrete-event simulation of one scenario. Single threaded; every random
/// draw comes from one of three seeded streams (workload, failures, RL).
class Simulator {
 public:
  explicit Simulator(Scenario scenario);

  /// Advances one tick: dispatches the tick's arrivals, processes every event
  /// due by the end of the tick, then applies load decay. Returns the
  /// outcomes emitted during the tick.
  std::vector<TaskOutcome> step();

  /// True while arrivals remain or tasks are in flight.
  bool busy() const;

  /// Steps until idle and returns the accumulated report.
  RunReport run();

  Tick now() const { return tick_; }
  const AgentGraph& graph() const { return graph_; }
  const std::vector<Task>& workload() const { return tasks_; }
  const RunReport& report() const { return report_; }
  const MetricHistory& history() const { return history_; }
  std::size_t in_flight() const { return flights_.size(); }

  /// Route one task with the configured filter / hierarchy stack and the
  /// current weights.
  std::optional<RouteResult> route_task(const Task& task);

 private:
  enum class EventKind { kArrive, kServiceDone };
  struct Event {
    EventKind kind;
    TaskId task;
  };
  struct Flight {
    Task task;
    RouteResult route;
    Tick dispatch = 0;
    std::size_t hop = 0;  // index into route.path of the current agent
    std::size_t hops_traversed = 0;
    double latency_traversed = 0.0;
  };

  void dispatch(const Task& task);
  void handle(const Event& event);
  void schedule(Tick at, EventKind kind, TaskId task);
  void emit(TaskOutcome outcome);
  void close_window();
  void decay_loads();
  std::vector<AgentNode> snapshot() const;

  Scenario scenario_;
  AgentGraph graph_;
  std::map<AgentId, double> base_load_;
  std::map<AgentId, double> excess_load_;
  std::vector<Task> tasks_;
  std::size_t next_task_ = 0;
  Tick tick_ = 0;
  std::uint64_t sequence_ = 0;
  std::map<std::pair<Tick, std::uint64_t>, Event> events_;
  std::map<TaskId, Flight> flights_;
  RandomStream failure_rng_;
  RLAdapter adapter_;
  MetricHistory history_;
  std::optional<Clustering> clustering_;
  std::size_t window_start_ = 0;
  std::vector<TaskOutcome> emitted_;
  RunReport report_;
};

/// Convenience: Simulator(scenario).run().
RunReport run_scenario(const Scenario& scenario);

/// Ticks needed to cross a link / serve a task: ceil of the value, >= 0.
Tick latency_ticks(double latency);
Tick service_ticks(double complexity, double capability);

}  // namespace apbda
