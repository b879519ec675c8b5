#include "apbda/scenario.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "apbda/errors.hpp"

namespace apbda {

namespace {

int line_of(const YAML::Node& node) { return node.Mark().line >= 0 ? node.Mark().line + 1 : 0; }

[[noreturn]] void fail(const YAML::Node& node, const std::string& message) {
  throw ScenarioError(line_of(node), message);
}

void expect_map(const YAML::Node& node, const std::string& what) {
  if (!node.IsMap()) fail(node, what + " must be a mapping");
}

void check_keys(const YAML::Node& node, const std::string& what, std::initializer_list<const char*> keys) {
  expect_map(node, what);
  for (const auto& entry : node) {
    const std::string key = entry.first.as<std::string>();
    bool known = false;
    for (const char* k : keys) known = known || key == k;
    if (!known) fail(entry.first, "unknown key '" + key + "' in " + what);
  }
}

template <typename T>
T scalar(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail(node, what + " must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail(node, what + " has an invalid value '" + node.Scalar() + "'");
  }
}

template <typename T>
void read_optional(const YAML::Node& parent, const char* key, const std::string& where, T& out) {
  if (const YAML::Node n = parent[key]) out = scalar<T>(n, where + "." + key);
}

template <typename T>
T read_required(const YAML::Node& parent, const char* key, const std::string& where) {
  const YAML::Node n = parent[key];
  if (!n) fail(parent, "missing required key '" + std::string(key) + "' in " + where);
  return scalar<T>(n, where + "." + key);
}

Range read_range(const YAML::Node& node, const std::string& what) {
  if (!node.IsSequence() || node.size() != 2) fail(node, what + " must be a [lo, hi] pair");
  return Range{scalar<double>(node[0], what + "[0]"), scalar<double>(node[1], what + "[1]")};
}

std::array<double, 2> read_edges(const YAML::Node& node, const std::string& what) {
  const Range r = read_range(node, what);
  if (r.hi < r.lo) fail(node, what + " must be ascending");
  return {r.lo, r.hi};
}

struct Context {
  Scenario scenario;
  std::map<std::string, AgentId> ids;

  AgentId resolve(const YAML::Node& node, const std::string& what) const {
    const std::string name = scalar<std::string>(node, what);
    auto it = ids.find(name);
    if (it == ids.end()) fail(node, what + " references unknown node '" + name + "'");
    return it->second;
  }

  std::vector<AgentId> resolve_list(const YAML::Node& node, const std::string& what) const {
    if (!node.IsSequence()) fail(node, what + " must be a list of node names");
    std::vector<AgentId> out;
    for (std::size_t i = 0; i < node.size(); ++i) {
      out.push_back(resolve(node[i], what + "[" + std::to_string(i) + "]"));
    }
    return out;
  }
};

void report_violations(const YAML::Node& node, const std::vector<std::string>& violations) {
  if (!violations.empty()) fail(node, violations.front());
}

void parse_nodes(const YAML::Node& block, Context& ctx) {
  if (!block.IsSequence()) fail(block, "nodes must be a list");
  for (std::size_t i = 0; i < block.size(); ++i) {
    const YAML::Node n = block[i];
    const std::string where = "nodes[" + std::to_string(i) + "]";
    check_keys(n, where,
               {"name", "capability", "availability", "load_factor", "model_sophistication",
                "reliability"});
    const std::string name = read_required<std::string>(n, "name", where);
    AgentNode node;
    node.id = static_cast<AgentId>(ctx.scenario.names.size());
    node.capability = read_required<double>(n, "capability", where);
    read_optional(n, "availability", where, node.availability);
    read_optional(n, "load_factor", where, node.load_factor);
    read_optional(n, "model_sophistication", where, node.model_sophistication);
    read_optional(n, "reliability", where, node.reliability);
    if (!ctx.ids.emplace(name, node.id).second) fail(n["name"], "duplicate node name '" + name + "'");
    report_violations(n, validate_node(node));
    ctx.scenario.names.push_back(name);
    ctx.scenario.graph.add_node(node);
  }
}

void parse_edges(const YAML::Node& block, Context& ctx) {
  if (!block.IsSequence()) fail(block, "edges must be a list");
  std::set<std::pair<AgentId, AgentId>> seen;
  for (std::size_t i = 0; i < block.size(); ++i) {
    const YAML::Node e = block[i];
    const std::string where = "edges[" + std::to_string(i) + "]";
    check_keys(e, where, {"from", "to", "bandwidth", "latency", "symmetric"});
    if (!e["from"]) fail(e, "missing required key 'from' in " + where);
    if (!e["to"]) fail(e, "missing required key 'to' in " + where);
    Link link;
    link.from = ctx.resolve(e["from"], where + ".from");
    link.to = ctx.resolve(e["to"], where + ".to");
    link.bandwidth = read_required<double>(e, "bandwidth", where);
    link.latency = read_required<double>(e, "latency", where);
    bool symmetric = false;
    read_optional(e, "symmetric", where, symmetric);
    report_violations(e, validate_link(link));

    std::vector<Link> expanded{link};
    if (symmetric) expanded.push_back(Link{link.to, link.from, link.bandwidth, link.latency});
    for (const Link& l : expanded) {
      if (!seen.emplace(l.from, l.to).second) {
        fail(e, where + " duplicates link " + ctx.scenario.names[static_cast<std::size_t>(l.from)] +
                    " -> " + ctx.scenario.names[static_cast<std::size_t>(l.to)]);
      }
      ctx.scenario.graph.add_link(l);
    }
  }
}

void parse_weights(const YAML::Node& block, Context& ctx) {
  WeightVector w;
  if (block.IsSequence()) {
    if (block.size() != WeightVector::kSize) fail(block, "weights list must have 7 entries");
    for (std::size_t i = 0; i < WeightVector::kSize; ++i) {
      w[i] = scalar<double>(block[i], "weights[" + std::to_string(i) + "]");
    }
  } else {
    check_keys(block, "weights", {"w1", "w2", "w3", "w4", "w5", "w6", "w7"});
    for (std::size_t i = 0; i < WeightVector::kSize; ++i) {
      const std::string key = "w" + std::to_string(i + 1);
      w[i] = read_required<double>(block, key.c_str(), "weights");
    }
  }
  if (!w.valid()) fail(block, "weights must be >= 0 with at least one > 0");
  ctx.scenario.weights = w;
}

void parse_workload(const YAML::Node& block, Context& ctx) {
  check_keys(block, "workload",
             {"arrival_rate", "complexity", "priority", "sources", "destinations", "phases"});
  WorkloadParams& p = ctx.scenario.workload;
  read_optional(block, "arrival_rate", "workload", p.arrival_rate);
  if (block["complexity"]) p.complexity = read_range(block["complexity"], "workload.complexity");
  if (block["priority"]) p.priority = read_range(block["priority"], "workload.priority");
  if (block["sources"]) p.sources = ctx.resolve_list(block["sources"], "workload.sources");
  if (block["destinations"]) {
    p.destinations = ctx.resolve_list(block["destinations"], "workload.destinations");
  }
  if (const YAML::Node phases = block["phases"]) {
    if (!phases.IsSequence()) fail(phases, "workload.phases must be a list");
    for (std::size_t i = 0; i < phases.size(); ++i) {
      const YAML::Node ph = phases[i];
      const std::string where = "workload.phases[" + std::to_string(i) + "]";
      check_keys(ph, where, {"duration", "arrival_rate", "complexity", "priority"});
      WorkloadPhase phase;
      phase.duration = read_required<Tick>(ph, "duration", where);
      phase.arrival_rate = read_required<double>(ph, "arrival_rate", where);
      phase.complexity = ph["complexity"] ? read_range(ph["complexity"], where + ".complexity") : p.complexity;
      phase.priority = ph["priority"] ? read_range(ph["priority"], where + ".priority") : p.priority;
      p.phases.push_back(phase);
    }
  }
  report_violations(block, p.violations());
}

void parse_filter(const YAML::Node& block, Context& ctx) {
  check_keys(block, "filter", {"enabled", "max_latency", "min_reliability", "min_availability"});
  FilterPolicy& f = ctx.scenario.filter;
  f.enabled = true;
  read_optional(block, "enabled", "filter", f.enabled);
  if (block["max_latency"]) f.max_latency = scalar<double>(block["max_latency"], "filter.max_latency");
  if (block["min_reliability"]) {
    f.min_reliability = scalar<double>(block["min_reliability"], "filter.min_reliability");
  }
  if (block["min_availability"]) {
    f.min_availability = scalar<double>(block["min_availability"], "filter.min_availability");
  }
  report_violations(block, f.violations());
}

void parse_hierarchy(const YAML::Node& block, Context& ctx) {
  check_keys(block, "hierarchy", {"enabled", "k", "seed"});
  HierarchyConfig& h = ctx.scenario.hierarchy;
  h.enabled = true;
  read_optional(block, "enabled", "hierarchy", h.enabled);
  h.k = read_required<std::size_t>(block, "k", "hierarchy");
  read_optional(block, "seed", "hierarchy", h.seed);
  if (h.k < 1 || h.k > ctx.scenario.graph.node_count()) {
    fail(block["k"], "hierarchy.k must be in [1, node count]");
  }
}

void parse_rl(const YAML::Node& block, Context& ctx) {
  check_keys(block, "rl",
             {"enabled", "eta", "gamma_d", "epsilon_start", "epsilon_end", "anneal_windows", "step",
              "window", "alpha", "beta", "gamma", "w_min", "w_max", "high_priority_threshold",
              "buckets"});
  RLConfig& rl = ctx.scenario.rl;
  rl.enabled = true;
  read_optional(block, "enabled", "rl", rl.enabled);
  read_optional(block, "eta", "rl", rl.eta);
  read_optional(block, "gamma_d", "rl", rl.gamma_d);
  read_optional(block, "epsilon_start", "rl", rl.epsilon_start);
  read_optional(block, "epsilon_end", "rl", rl.epsilon_end);
  read_optional(block, "anneal_windows", "rl", rl.anneal_windows);
  read_optional(block, "step", "rl", rl.step);
  read_optional(block, "window", "rl", rl.window);
  read_optional(block, "alpha", "rl", rl.alpha);
  read_optional(block, "beta", "rl", rl.beta);
  read_optional(block, "gamma", "rl", rl.gamma);
  read_optional(block, "w_min", "rl", rl.w_min);
  read_optional(block, "w_max", "rl", rl.w_max);
  read_optional(block, "high_priority_threshold", "rl", rl.high_priority_threshold);
  if (const YAML::Node b = block["buckets"]) {
    check_keys(b, "rl.buckets", {"avg_latency", "load_stddev", "incident_rate", "priority_profile"});
    if (b["avg_latency"]) rl.buckets.avg_latency = read_edges(b["avg_latency"], "rl.buckets.avg_latency");
    if (b["load_stddev"]) rl.buckets.load_stddev = read_edges(b["load_stddev"], "rl.buckets.load_stddev");
    if (b["incident_rate"]) {
      rl.buckets.incident_rate = read_edges(b["incident_rate"], "rl.buckets.incident_rate");
    }
    if (b["priority_profile"]) {
      rl.buckets.priority_profile = read_edges(b["priority_profile"], "rl.buckets.priority_profile");
    }
  }
  report_violations(block, rl.violations());
}

void parse_sim(const YAML::Node& block, Context& ctx) {
  check_keys(block, "sim", {"duration", "seeds", "load_quantum", "load_decay", "history_decay"});
  SimConfig& s = ctx.scenario.sim;
  read_optional(block, "duration", "sim", s.duration);
  read_optional(block, "load_quantum", "sim", s.load_quantum);
  read_optional(block, "load_decay", "sim", s.load_decay);
  read_optional(block, "history_decay", "sim", s.history_decay);
  if (const YAML::Node seeds = block["seeds"]) {
    check_keys(seeds, "sim.seeds", {"workload", "failure", "rl"});
    read_optional(seeds, "workload", "sim.seeds", s.seeds.workload);
    read_optional(seeds, "failure", "sim.seeds", s.seeds.failure);
    read_optional(seeds, "rl", "sim.seeds", s.seeds.rl);
  }
  if (s.duration < 0) fail(block["duration"], "sim.duration must be >= 0");
}

void append_range(std::ostringstream& os, const Range& r) {
  os << "[" << format_number(r.lo) << ", " << format_number(r.hi) << "]";
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string format_number(double value) {
  char buffer[64];
  const auto result = std::to_chars(buffer, buffer + sizeof(buffer), value);
  return std::string(buffer, result.ptr);
}

Scenario parse_scenario(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ScenarioError(e.mark.line + 1, e.msg);
  }
  if (!root.IsMap()) throw ScenarioError(line_of(root), "scenario must be a mapping");
  check_keys(root, "scenario",
             {"nodes", "edges", "weights", "workload", "filter", "hierarchy", "rl", "sim"});
  for (const char* required : {"nodes", "edges", "weights"}) {
    if (!root[required]) {
      throw ScenarioError(line_of(root), std::string("missing required block '") + required + "'");
    }
  }

  Context ctx;
  parse_nodes(root["nodes"], ctx);
  if (root["edges"].IsNull()) {
    // `edges:` with no entries
  } else {
    parse_edges(root["edges"], ctx);
  }
  parse_weights(root["weights"], ctx);
  if (root["workload"]) parse_workload(root["workload"], ctx);
  if (root["filter"]) parse_filter(root["filter"], ctx);
  if (root["hierarchy"]) parse_hierarchy(root["hierarchy"], ctx);
  if (root["rl"]) parse_rl(root["rl"], ctx);
  if (root["sim"]) parse_sim(root["sim"], ctx);

  if (auto v = ctx.scenario.violations(); !v.empty()) throw ScenarioError(0, v.front());
  return ctx.scenario;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError(0, "cannot open scenario file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

std::optional<AgentId> lookup_node(const Scenario& scenario, std::string_view name_or_id) {
  for (std::size_t i = 0; i < scenario.names.size(); ++i) {
    if (scenario.names[i] == name_or_id) return static_cast<AgentId>(i);
  }
  AgentId id = 0;
  const auto* end = name_or_id.data() + name_or_id.size();
  const auto result = std::from_chars(name_or_id.data(), end, id);
  if (result.ec == std::errc() && result.ptr == end && scenario.graph.contains(id)) return id;
  return std::nullopt;
}

std::string write_scenario(const Scenario& s) {
  auto name = [&](AgentId id) {
    const auto i = static_cast<std::size_t>(id);
    return quote(i < s.names.size() ? s.names[i] : "n" + std::to_string(id));
  };
  std::ostringstream os;
  os << "nodes:\n";
  for (const auto& [id, n] : s.graph.nodes()) {
    os << "  - {name: " << name(id) << ", capability: " << format_number(n.capability)
       << ", availability: " << format_number(n.availability)
       << ", load_factor: " << format_number(n.load_factor)
       << ", model_sophistication: " << format_number(n.model_sophistication)
       << ", reliability: " << format_number(n.reliability) << "}\n";
  }
  const auto links = s.graph.links();
  os << "edges:" << (links.empty() ? " []" : "") << "\n";
  for (const Link& l : links) {
    os << "  - {from: " << name(l.from) << ", to: " << name(l.to)
       << ", bandwidth: " << format_number(l.bandwidth) << ", latency: " << format_number(l.latency)
       << "}\n";
  }
  os << "weights: {";
  for (std::size_t i = 0; i < WeightVector::kSize; ++i) {
    os << (i ? ", " : "") << "w" << i + 1 << ": " << format_number(s.weights[i]);
  }
  os << "}\n";

  const WorkloadParams& w = s.workload;
  os << "workload:\n  arrival_rate: " << format_number(w.arrival_rate) << "\n  complexity: ";
  append_range(os, w.complexity);
  os << "\n  priority: ";
  append_range(os, w.priority);
  os << "\n";
  auto write_list = [&](const char* key, const std::vector<AgentId>& ids) {
    if (ids.empty()) return;
    os << "  " << key << ": [";
    for (std::size_t i = 0; i < ids.size(); ++i) os << (i ? ", " : "") << name(ids[i]);
    os << "]\n";
  };
  write_list("sources", w.sources);
  write_list("destinations", w.destinations);
  if (!w.phases.empty()) {
    os << "  phases:\n";
    for (const auto& p : w.phases) {
      os << "    - {duration: " << p.duration << ", arrival_rate: " << format_number(p.arrival_rate)
         << ", complexity: ";
      append_range(os, p.complexity);
      os << ", priority: ";
      append_range(os, p.priority);
      os << "}\n";
    }
  }

  os << "filter:\n  enabled: " << (s.filter.enabled ? "true" : "false") << "\n";
  if (s.filter.max_latency) os << "  max_latency: " << format_number(*s.filter.max_latency) << "\n";
  if (s.filter.min_reliability) {
    os << "  min_reliability: " << format_number(*s.filter.min_reliability) << "\n";
  }
  if (s.filter.min_availability) {
    os << "  min_availability: " << format_number(*s.filter.min_availability) << "\n";
  }

  if (s.graph.node_count() > 0) {
    os << "hierarchy: {enabled: " << (s.hierarchy.enabled ? "true" : "false")
       << ", k: " << s.hierarchy.k << ", seed: " << s.hierarchy.seed << "}\n";
  }

  const RLConfig& r = s.rl;
  os << "rl:\n  enabled: " << (r.enabled ? "true" : "false") << "\n  eta: " << format_number(r.eta)
     << "\n  gamma_d: " << format_number(r.gamma_d)
     << "\n  epsilon_start: " << format_number(r.epsilon_start)
     << "\n  epsilon_end: " << format_number(r.epsilon_end) << "\n  anneal_windows: " << r.anneal_windows
     << "\n  step: " << format_number(r.step) << "\n  window: " << r.window
     << "\n  alpha: " << format_number(r.alpha) << "\n  beta: " << format_number(r.beta)
     << "\n  gamma: " << format_number(r.gamma) << "\n  w_min: " << format_number(r.w_min)
     << "\n  w_max: " << format_number(r.w_max)
     << "\n  high_priority_threshold: " << format_number(r.high_priority_threshold) << "\n  buckets:\n";
  auto edges = [&](const char* key, const std::array<double, 2>& e) {
    os << "    " << key << ": [" << format_number(e[0]) << ", " << format_number(e[1]) << "]\n";
  };
  edges("avg_latency", r.buckets.avg_latency);
  edges("load_stddev", r.buckets.load_stddev);
  edges("incident_rate", r.buckets.incident_rate);
  edges("priority_profile", r.buckets.priority_profile);

  os << "sim:\n  duration: " << s.sim.duration << "\n  seeds: {workload: " << s.sim.seeds.workload
     << ", failure: " << s.sim.seeds.failure << ", rl: " << s.sim.seeds.rl << "}\n"
     << "  load_quantum: " << format_number(s.sim.load_quantum)
     << "\n  load_decay: " << format_number(s.sim.load_decay)
     << "\n  history_decay: " << format_number(s.sim.history_decay) << "\n";
  return os.str();
}

}  // namespace apbda
