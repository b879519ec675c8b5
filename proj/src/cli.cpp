#include "apbda/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <optional>

#include "apbda/cost.hpp"
#include "apbda/errors.hpp"
#include "apbda/hierarchy.hpp"
#include "apbda/oracle.hpp"
#include "apbda/report.hpp"
#include "apbda/router.hpp"
#include "apbda/scenario.hpp"

namespace apbda {

namespace {

struct RouteArgs {
  std::string scenario;
  std::string from;
  std::string to;
  double complexity = 1.0;
  double priority = 1.0;
  bool explain = false;
  bool no_filter = false;
  bool hierarchical = false;
  std::size_t k = 0;
};

struct SimulateArgs {
  std::string scenario;
  std::string records = "records.jsonl";
  std::string summary = "summary.json";
  std::string qtable;
  bool no_filter = false;
  bool hierarchical = false;
  std::size_t k = 0;
  bool no_rl = false;
  std::optional<Tick> duration;
  std::optional<std::uint64_t> workload_seed;
  std::optional<std::uint64_t> failure_seed;
  std::optional<std::uint64_t> rl_seed;
};

struct VerifyArgs {
  std::size_t nodes = 8;
  std::size_t instances = 1000;
  std::uint64_t seed = 1;
  std::string fault = "none";
};

// Flags override scenario blocks.
void apply_overrides(Scenario& s, bool no_filter, bool hierarchical, std::size_t k) {
  if (no_filter) s.filter.enabled = false;
  if (hierarchical) {
    s.hierarchy.enabled = true;
    if (k > 0) {
      s.hierarchy.k = k;
    } else if (s.hierarchy.k <= 1) {
      std::size_t root = 1;
      while (root * root < s.graph.node_count()) ++root;
      s.hierarchy.k = root;
    }
    if (s.hierarchy.k > s.graph.node_count()) throw InvalidK("--k exceeds the node count");
  }
}

std::string node_name(const Scenario& s, AgentId id) {
  const auto i = static_cast<std::size_t>(id);
  return i < s.names.size() ? s.names[i] : std::to_string(id);
}

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

int cmd_validate(const std::string& path, std::ostream& out) {
  const Scenario s = load_scenario(path);
  out << "ok: " << s.graph.node_count() << " nodes, " << s.graph.link_count() << " links\n";
  return kExitOk;
}

int cmd_route(const RouteArgs& args, std::ostream& out, std::ostream& err) {
  Scenario s = load_scenario(args.scenario);
  apply_overrides(s, args.no_filter, args.hierarchical, args.k);

  const auto from = lookup_node(s, args.from);
  const auto to = lookup_node(s, args.to);
  if (!from) {
    err << "error: unknown source node '" << args.from << "'\n";
    return kExitInputError;
  }
  if (!to) {
    err << "error: unknown destination node '" << args.to << "'\n";
    return kExitInputError;
  }
  Task task;
  task.complexity = args.complexity;
  task.priority = args.priority;
  task.source = *from;
  task.destination = *to;
  if (auto v = validate_task(task, s.graph); !v.empty()) {
    err << "error: " << v.front() << '\n';
    return kExitInputError;
  }

  const AgentGraph routed = apply_filter(s.graph, s.filter, task);
  std::optional<RouteResult> result;
  if (s.hierarchy.enabled) {
    const Clustering clustering =
        restrict_clustering(build_clustering(s.graph, s.hierarchy.k, s.hierarchy.seed), routed);
    result = route_hierarchical(routed, clustering, task, s.weights);
  } else {
    result = route(routed, task, s.weights);
  }

  const PolicyEcho policy = describe_policy(s);
  out << "# policy:";
  for (const auto& [key, value] : policy) out << ' ' << key << '=' << value;
  out << '\n';
  if (!result) {
    out << "unreachable\n";
    return kExitUnreachable;
  }

  out << "path:";
  for (std::size_t i = 0; i < result->path.size(); ++i) {
    out << (i ? " -> " : " ") << node_name(s, result->path[i]);
  }
  out << "\ntotal_cost: " << format_number(result->total_cost) << '\n'
      << "nodes_expanded: " << result->nodes_expanded << '\n'
      << "edges_relaxed: " << result->edges_relaxed << '\n';

  if (args.explain) {
    for (std::size_t h = 1; h < result->path.size(); ++h) {
      const AgentId a = result->path[h - 1];
      const AgentId b = result->path[h];
      const CostBreakdown cb = compute_cost(task, s.graph.node(a), s.graph.node(b),
                                            *s.graph.find_link(a, b), s.weights);
      out << "hop " << h << ": " << node_name(s, a) << " -> " << node_name(s, b)
          << " cost " << format_number(cb.total) << '\n';
      for (std::size_t i = 0; i < cb.terms.size(); ++i) {
        out << "  w" << i + 1 << ' ' << cb.terms[i].name << " raw " << format_number(cb.terms[i].raw)
            << " weighted " << format_number(cb.terms[i].weighted) << '\n';
      }
    }
  }
  return kExitOk;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out) {
  Scenario s = load_scenario(args.scenario);
  apply_overrides(s, args.no_filter, args.hierarchical, args.k);
  if (args.no_rl) s.rl.enabled = false;
  if (args.duration) s.sim.duration = *args.duration;
  if (args.workload_seed) s.sim.seeds.workload = *args.workload_seed;
  if (args.failure_seed) s.sim.seeds.failure = *args.failure_seed;
  if (args.rl_seed) s.sim.seeds.rl = *args.rl_seed;
  if (auto v = s.violations(); !v.empty()) throw ScenarioError(0, v.front());

  const RunReport report = run_scenario(s);
  const PolicyEcho policy = describe_policy(s);
  write_file(args.records, records_jsonl(report));
  write_file(args.summary, summary_json(report, s, policy));
  if (!args.qtable.empty()) write_file(args.qtable, qtable_json(report.q_table));
  out << summary_text(report, s, policy);
  return kExitOk;
}

int cmd_verify(const VerifyArgs& args, std::ostream& out, std::ostream& err) {
  RouterOptions options;
  if (args.fault == "reverse-frontier") options.fault = RouterFault::kReverseFrontierOrder;
  const VerifyReport report = verify_batch(args.nodes, args.instances, args.seed, options);
  for (const VerifyFailure& f : report.failures) {
    err << "FAIL instance " << f.instance << " seed " << f.seed << " nodes " << f.node_count
        << " density " << format_number(f.density) << ": " << f.detail << '\n';
  }
  out << "verified " << args.instances << " instances: " << report.passed << " passed, "
      << report.failures.size() << " failed\n";
  return report.failures.empty() ? kExitOk : kExitVerifyFailed;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Priority-aware adaptive routing for simulated agent networks", "apbda"};
  app.require_subcommand(1);

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Parse and validate a scenario file");
  validate->add_option("scenario", validate_path, "Scenario YAML file")->required();

  RouteArgs route_args;
  auto* route_cmd = app.add_subcommand("route", "Route one task through a scenario's graph");
  route_cmd->add_option("scenario", route_args.scenario, "Scenario YAML file")->required();
  route_cmd->add_option("--from", route_args.from, "Source node name or id")->required();
  route_cmd->add_option("--to", route_args.to, "Destination node name or id")->required();
  route_cmd->add_option("-T,--complexity", route_args.complexity, "Task complexity T")
      ->capture_default_str();
  route_cmd->add_option("-P,--priority", route_args.priority, "Task priority P")->capture_default_str();
  route_cmd->add_flag("--explain", route_args.explain, "Print the per-hop cost breakdown");
  route_cmd->add_flag("--no-filter", route_args.no_filter, "Ignore the scenario's filter block");
  route_cmd->add_flag("--hierarchical", route_args.hierarchical, "Use two-level cluster routing");
  route_cmd->add_option("--k", route_args.k, "Cluster count for --hierarchical");

  SimulateArgs sim_args;
  auto* simulate = app.add_subcommand("simulate", "Run the discrete-event simulation");
  simulate->add_option("scenario", sim_args.scenario, "Scenario YAML file")->required();
  simulate->add_option("--records", sim_args.records, "Output JSONL records file")->capture_default_str();
  simulate->add_option("--summary", sim_args.summary, "Output summary JSON file")->capture_default_str();
  simulate->add_option("--qtable-out", sim_args.qtable, "Write the learned Q table as JSON");
  simulate->add_flag("--no-filter", sim_args.no_filter, "Ignore the scenario's filter block");
  simulate->add_flag("--hierarchical", sim_args.hierarchical, "Use two-level cluster routing");
  simulate->add_option("--k", sim_args.k, "Cluster count for --hierarchical");
  simulate->add_flag("--no-rl", sim_args.no_rl, "Freeze the weights");
  simulate->add_option("--duration", sim_args.duration, "Override sim.duration");
  simulate->add_option("--workload-seed", sim_args.workload_seed, "Override sim.seeds.workload");
  simulate->add_option("--failure-seed", sim_args.failure_seed, "Override sim.seeds.failure");
  simulate->add_option("--rl-seed", sim_args.rl_seed, "Override sim.seeds.rl");

  VerifyArgs verify_args;
  auto* verify = app.add_subcommand("verify", "Check the router against the brute-force oracle");
  verify->add_option("--nodes", verify_args.nodes, "Largest instance size (<= 10)")->capture_default_str();
  verify->add_option("--instances", verify_args.instances, "Number of instances")->capture_default_str();
  verify->add_option("--seed", verify_args.seed, "Batch seed")->capture_default_str();
  verify->add_option("--fault-inject", verify_args.fault)
      ->check(CLI::IsMember({"none", "reverse-frontier"}))
      ->group("");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  try {
    if (*validate) return cmd_validate(validate_path, out);
    if (*route_cmd) return cmd_route(route_args, out, err);
    if (*simulate) return cmd_simulate(sim_args, out);
    if (*verify) {
      if (verify_args.nodes > kOracleNodeGuard || verify_args.nodes < 2) {
        err << "error: --nodes must be in [2, " << kOracleNodeGuard << "]\n";
        return kExitInputError;
      }
      return cmd_verify(verify_args, out, err);
    }
  } catch (const ScenarioError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace apbda
