#include "apbda/sim.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>

#include "apbda/errors.hpp"
#include "apbda/router.hpp"

namespace apbda {

namespace {

void check_range(const Range& r, const std::string& name, std::vector<std::string>& out) {
  if (!(r.lo > 0.0) || !(r.hi >= r.lo) || !std::isfinite(r.hi)) {
    out.push_back(name + " must satisfy 0 < lo <= hi");
  }
}

// Phase active at `tick` for a cyclic schedule.
const WorkloadPhase& phase_at(const std::vector<WorkloadPhase>& phases, Tick tick) {
  Tick cycle = 0;
  for (const auto& p : phases) cycle += p.duration;
  Tick offset = tick % cycle;
  for (const auto& p : phases) {
    if (offset < p.duration) return p;
    offset -= p.duration;
  }
  return phases.back();
}

std::vector<AgentId> allowed(const std::vector<AgentId>& restriction, std::span<const AgentId> nodes) {
  if (restriction.empty()) return {nodes.begin(), nodes.end()};
  return restriction;
}

constexpr double kLoadFloor = 1e-12;

}  // namespace

std::vector<std::string> WorkloadParams::violations() const {
  std::vector<std::string> out;
  if (phases.empty()) {
    if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate)) {
      out.push_back("workload.arrival_rate must be > 0");
    }
    check_range(complexity, "workload.complexity", out);
    check_range(priority, "workload.priority", out);
  }
  for (std::size_t i = 0; i < phases.size(); ++i) {
    const std::string who = "workload.phases[" + std::to_string(i) + "]";
    if (phases[i].duration < 1) out.push_back(who + ".duration must be >= 1");
    if (!(phases[i].arrival_rate >= 0.0) || !std::isfinite(phases[i].arrival_rate)) {
      out.push_back(who + ".arrival_rate must be >= 0");
    }
    check_range(phases[i].complexity, who + ".complexity", out);
    check_range(phases[i].priority, who + ".priority", out);
  }
  if (!phases.empty()) {
    bool any = false;
    for (const auto& p : phases) any = any || p.arrival_rate > 0.0;
    if (!any) out.push_back("workload.phases must have a positive arrival_rate somewhere");
  }
  return out;
}

std::vector<Task> generate_workload(const WorkloadParams& params, std::span<const AgentId> nodes,
                                    Tick duration, std::uint64_t seed) {
  if (auto v = params.violations(); !v.empty()) throw InvalidParams(v.front());
  if (duration < 0) throw InvalidParams("duration must be >= 0");
  const std::vector<AgentId> sources = allowed(params.sources, nodes);
  const std::vector<AgentId> destinations = allowed(params.destinations, nodes);
  const std::set<AgentId> known(nodes.begin(), nodes.end());
  for (AgentId id : sources) {
    if (!known.count(id)) throw InvalidParams("workload source " + std::to_string(id) + " is not a node");
  }
  for (AgentId id : destinations) {
    if (!known.count(id)) {
      throw InvalidParams("workload destination " + std::to_string(id) + " is not a node");
    }
  }
  if (sources.empty() || destinations.empty() ||
      (sources.size() == 1 && destinations.size() == 1 && sources[0] == destinations[0])) {
    throw InvalidParams("workload needs at least one distinct source/destination pair");
  }

  RandomStream rng(seed);
  std::vector<Task> out;
  for (Tick t = 0; t < duration; ++t) {
    double rate = params.arrival_rate;
    Range complexity = params.complexity;
    Range priority = params.priority;
    if (!params.phases.empty()) {
      const WorkloadPhase& p = phase_at(params.phases, t);
      rate = p.arrival_rate;
      complexity = p.complexity;
      priority = p.priority;
    }
    const std::uint64_t arrivals = rng.poisson(rate);
    for (std::uint64_t i = 0; i < arrivals; ++i) {
      Task task;
      task.id = static_cast<TaskId>(out.size());
      task.submit_time = t;
      task.complexity = rng.uniform(complexity.lo, complexity.hi);
      task.priority = rng.uniform(priority.lo, priority.hi);
      task.source = sources[rng.uniform_index(sources.size())];
      do {
        task.destination = destinations[rng.uniform_index(destinations.size())];
      } while (task.destination == task.source);
      out.push_back(task);
    }
  }
  return out;
}

std::vector<std::string> Scenario::violations() const {
  std::vector<std::string> out = validate_graph(graph);
  if (!weights.valid()) out.push_back("weights must be >= 0 with at least one > 0");
  for (auto& v : workload.violations()) out.push_back(v);
  for (auto& v : filter.violations()) out.push_back(v);
  for (auto& v : rl.violations()) out.push_back(v);
  if (hierarchy.enabled && (hierarchy.k < 1 || hierarchy.k > graph.node_count())) {
    out.push_back("hierarchy.k must be in [1, node count]");
  }
  if (sim.duration < 0) out.push_back("sim.duration must be >= 0");
  if (!(sim.load_quantum >= 0.0)) out.push_back("sim.load_quantum must be >= 0");
  if (!(sim.load_decay >= 0.0 && sim.load_decay < 1.0)) out.push_back("sim.load_decay must be in [0, 1)");
  if (!(sim.history_decay >= 0.0 && sim.history_decay < 1.0)) {
    out.push_back("sim.history_decay must be in [0, 1)");
  }
  return out;
}

Tick latency_ticks(double latency) { return static_cast<Tick>(std::ceil(std::max(latency, 0.0))); }

Tick service_ticks(double complexity, double capability) {
  return static_cast<Tick>(std::ceil(std::max(complexity / capability, 0.0)));
}

Simulator::Simulator(Scenario scenario)
    : scenario_(std::move(scenario)),
      graph_(scenario_.graph),
      failure_rng_(scenario_.sim.seeds.failure),
      adapter_(scenario_.rl, scenario_.weights, scenario_.sim.seeds.rl),
      history_(scenario_.sim.history_decay) {
  if (auto v = scenario_.violations(); !v.empty()) throw InvalidParams(v.front());
  for (const auto& [id, node] : graph_.nodes()) {
    base_load_[id] = node.load_factor;
    excess_load_[id] = 0.0;
    AgentNode derived = node;
    derived.availability = std::max(kEpsDiv, 1.0 - std::min(1.0, node.load_factor));
    graph_.update_node(derived);
  }
  history_.reset(graph_);
  const std::vector<AgentId> ids = graph_.node_ids();
  if (scenario_.sim.duration > 0) {
    tasks_ = generate_workload(scenario_.workload, ids, scenario_.sim.duration,
                               scenario_.sim.seeds.workload);
  }
  if (scenario_.hierarchy.enabled) {
    clustering_ = build_clustering(graph_, scenario_.hierarchy.k, scenario_.hierarchy.seed);
  }
  report_.initial_weights = scenario_.weights;
  report_.final_weights = scenario_.weights;
  report_.generated_tasks = tasks_.size();
}

bool Simulator::busy() const { return next_task_ < tasks_.size() || !events_.empty(); }

std::optional<RouteResult> Simulator::route_task(const Task& task) {
  const WeightVector& weights = adapter_.weights();
  const AgentGraph routed = apply_filter(graph_, scenario_.filter, task, &history_);
  if (!clustering_) return route(routed, task, weights);

  const Clustering local = restrict_clustering(*clustering_, routed);
  auto hierarchical = route_hierarchical(routed, local, task, weights);
  const auto flat = route(routed, task, weights);
  if (hierarchical && flat) {
    const double ratio = flat->total_cost > 0.0 ? hierarchical->total_cost / flat->total_cost : 1.0;
    report_.hierarchy_ratios.push_back(ratio);
  }
  return hierarchical;
}

void Simulator::schedule(Tick at, EventKind kind, TaskId task) {
  events_.emplace(std::make_pair(at, sequence_++), Event{kind, task});
}

void Simulator::dispatch(const Task& task) {
  auto found = route_task(task);
  if (!found) {
    TaskOutcome o;
    o.task_id = task.id;
    o.complexity = task.complexity;
    o.priority = task.priority;
    o.source = task.source;
    o.destination = task.destination;
    o.dispatch_tick = tick_;
    o.completion_tick = tick_;
    o.succeeded = false;
    emit(std::move(o));
    return;
  }
  Flight flight{task, std::move(*found), tick_};
  if (flight.route.path.size() == 1) {
    TaskOutcome o;
    o.task_id = task.id;
    o.complexity = task.complexity;
    o.priority = task.priority;
    o.source = task.source;
    o.destination = task.destination;
    o.path = flight.route.path;
    o.route_cost = flight.route.total_cost;
    o.dispatch_tick = o.completion_tick = tick_;
    o.succeeded = true;
    emit(std::move(o));
    return;
  }
  const Link* first = graph_.find_link(flight.route.path[0], flight.route.path[1]);
  const Tick at = tick_ + latency_ticks(first->latency);
  flights_.emplace(task.id, std::move(flight));
  schedule(at, EventKind::kArrive, task.id);
}

void Simulator::handle(const Event& event) {
  Flight& f = flights_.at(event.task);
  const auto& path = f.route.path;

  auto finish = [&](bool succeeded, std::optional<AgentId> failure_node) {
    TaskOutcome o;
    o.task_id = f.task.id;
    o.complexity = f.task.complexity;
    o.priority = f.task.priority;
    o.source = f.task.source;
    o.destination = f.task.destination;
    o.path = path;
    o.dispatch_tick = f.dispatch;
    o.completion_tick = tick_;
    o.completion_time = tick_ - f.dispatch;
    o.succeeded = succeeded;
    o.failure_node = failure_node;
    o.route_cost = f.route.total_cost;
    o.hops_traversed = f.hops_traversed;
    o.latency_traversed = f.latency_traversed;
    flights_.erase(event.task);
    emit(std::move(o));
  };

  if (event.kind == EventKind::kArrive) {
    ++f.hop;
    const AgentId at = path[f.hop];
    const Link* link = graph_.find_link(path[f.hop - 1], at);
    ++f.hops_traversed;
    f.latency_traversed += link->latency;
    history_.observe_latency(link->from, link->to, link->latency);

    const AgentNode& node = graph_.node(at);
    const bool failed = failure_rng_.bernoulli(1.0 - node.reliability);
    history_.observe_reliability(at, failed ? 0.0 : 1.0);
    if (failed) {
      finish(false, at);
      return;
    }
    excess_load_[at] += scenario_.sim.load_quantum;
    schedule(tick_ + service_ticks(f.task.complexity, node.capability), EventKind::kServiceDone,
             event.task);
    return;
  }

  if (f.hop + 1 == path.size()) {
    finish(true, std::nullopt);
    return;
  }
  const Link* next = graph_.find_link(path[f.hop], path[f.hop + 1]);
  schedule(tick_ + latency_ticks(next->latency), EventKind::kArrive, event.task);
}

void Simulator::emit(TaskOutcome outcome) {
  report_.outcomes.push_back(outcome);
  emitted_.push_back(std::move(outcome));
  if (report_.outcomes.size() - window_start_ >= scenario_.rl.window) close_window();
}

std::vector<AgentNode> Simulator::snapshot() const {
  std::vector<AgentNode> out;
  out.reserve(graph_.node_count());
  for (const auto& [id, node] : graph_.nodes()) out.push_back(node);
  return out;
}

void Simulator::close_window() {
  const std::span<const TaskOutcome> window(report_.outcomes.data() + window_start_,
                                            report_.outcomes.size() - window_start_);
  const std::vector<AgentNode> agents = snapshot();
  WindowRecord record;
  record.weights_used = adapter_.weights();
  record.state = observe_window(window, agents, scenario_.rl.high_priority_threshold);
  record.reward = adapter_.on_window(window, agents);
  record.first_outcome = window_start_;
  record.last_outcome = report_.outcomes.size() - 1;
  for (const AgentNode& a : agents) record.agent_loads.push_back(a.load_factor);
  record.weights_next = adapter_.weights();
  if (scenario_.rl.enabled) record.action = adapter_.last_action();
  report_.windows.push_back(std::move(record));
  report_.final_weights = adapter_.weights();
  window_start_ = report_.outcomes.size();
}

void Simulator::decay_loads() {
  for (auto& [id, excess] : excess_load_) {
    excess *= scenario_.sim.load_decay;
    if (excess < kLoadFloor) excess = 0.0;
    AgentNode node = graph_.node(id);
    node.load_factor = base_load_[id] + excess;
    node.availability = std::max(kEpsDiv, 1.0 - std::min(1.0, node.load_factor));
    graph_.update_node(node);
    history_.observe_availability(id, node.availability);
  }
}

std::vector<TaskOutcome> Simulator::step() {
  emitted_.clear();
  while (next_task_ < tasks_.size() && tasks_[next_task_].submit_time == tick_) {
    dispatch(tasks_[next_task_]);
    ++next_task_;
  }
  while (!events_.empty() && events_.begin()->first.first <= tick_) {
    const Event event = events_.begin()->second;
    events_.erase(events_.begin());
    handle(event);
  }
  decay_loads();
  ++tick_;
  return std::move(emitted_);
}

RunReport Simulator::run() {
  while (busy()) step();
  report_.q_table = adapter_.q_table();
  return report_;
}

RunReport run_scenario(const Scenario& scenario) { return Simulator(scenario).run(); }

}  // namespace apbda
