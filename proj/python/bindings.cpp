#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "apbda/cost.hpp"
#include "apbda/errors.hpp"
#include "apbda/filter.hpp"
#include "apbda/hierarchy.hpp"
#include "apbda/oracle.hpp"
#include "apbda/report.hpp"
#include "apbda/rl.hpp"
#include "apbda/router.hpp"
#include "apbda/scenario.hpp"
#include "apbda/sim.hpp"

#define STRINGIFY(x) #x
#define MACRO_STRINGIFY(x) STRINGIFY(x)

namespace py = pybind11;
using namespace apbda;

namespace {

WeightVector to_weights(const std::vector<double>& w) {
  if (w.size() != WeightVector::kSize) throw InvalidParams("weights must have 7 entries");
  WeightVector out;
  std::copy(w.begin(), w.end(), out.w.begin());
  return out;
}

py::object optional_route(const std::optional<RouteResult>& r) {
  if (!r) return py::none();
  return py::cast(*r);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Priority-aware adaptive routing for simulated agent networks";

  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<InvalidMetric>(m, "InvalidMetric", PyExc_ValueError);
  py::register_exception<UnknownNode>(m, "UnknownNode", PyExc_KeyError);
  py::register_exception<TooLarge>(m, "TooLarge", PyExc_ValueError);
  py::register_exception<InvalidParams>(m, "InvalidParams", PyExc_ValueError);
  py::register_exception<InvalidK>(m, "InvalidK", PyExc_ValueError);
  py::register_exception<EmptyWindow>(m, "EmptyWindow", PyExc_ValueError);
  py::register_exception<ScenarioError>(m, "ScenarioError", PyExc_ValueError);

  py::class_<AgentNode>(m, "AgentNode")
      .def(py::init([](AgentId id, double capability, double availability, double load_factor,
                       double model_sophistication, double reliability) {
             return AgentNode{id, capability, availability, load_factor, model_sophistication, reliability};
           }),
           py::arg("id"), py::arg("capability") = 1.0, py::arg("availability") = 1.0,
           py::arg("load_factor") = 0.0, py::arg("model_sophistication") = 1.0,
           py::arg("reliability") = 1.0)
      .def_readwrite("id", &AgentNode::id)
      .def_readwrite("capability", &AgentNode::capability)
      .def_readwrite("availability", &AgentNode::availability)
      .def_readwrite("load_factor", &AgentNode::load_factor)
      .def_readwrite("model_sophistication", &AgentNode::model_sophistication)
      .def_readwrite("reliability", &AgentNode::reliability)
      .def("__eq__", [](const AgentNode& a, const AgentNode& b) { return a == b; });

  py::class_<Link>(m, "Link")
      .def(py::init([](AgentId from, AgentId to, double bandwidth, double latency) {
             return Link{from, to, bandwidth, latency};
           }),
           py::arg("source"), py::arg("target"), py::arg("bandwidth") = 1.0, py::arg("latency") = 0.0)
      .def_readwrite("source", &Link::from)
      .def_readwrite("target", &Link::to)
      .def_readwrite("bandwidth", &Link::bandwidth)
      .def_readwrite("latency", &Link::latency);

  py::class_<AgentGraph>(m, "AgentGraph")
      .def(py::init<>())
      .def("add_node", &AgentGraph::add_node)
      .def("add_link", &AgentGraph::add_link)
      .def("node", &AgentGraph::node)
      .def("links", &AgentGraph::links)
      .def("node_ids", &AgentGraph::node_ids)
      .def_property_readonly("node_count", &AgentGraph::node_count)
      .def_property_readonly("link_count", &AgentGraph::link_count)
      .def("__contains__", &AgentGraph::contains);

  py::class_<Task>(m, "Task")
      .def(py::init([](AgentId source, AgentId destination, double complexity, double priority,
                       TaskId id) {
             Task t;
             t.id = id;
             t.source = source;
             t.destination = destination;
             t.complexity = complexity;
             t.priority = priority;
             return t;
           }),
           py::arg("source"), py::arg("destination"), py::arg("complexity") = 1.0,
           py::arg("priority") = 1.0, py::arg("id") = 0)
      .def_readwrite("id", &Task::id)
      .def_readwrite("complexity", &Task::complexity)
      .def_readwrite("priority", &Task::priority)
      .def_readwrite("source", &Task::source)
      .def_readwrite("destination", &Task::destination);

  py::class_<RouteResult>(m, "RouteResult")
      .def_readonly("path", &RouteResult::path)
      .def_readonly("hop_costs", &RouteResult::hop_costs)
      .def_readonly("total_cost", &RouteResult::total_cost)
      .def_readonly("nodes_expanded", &RouteResult::nodes_expanded)
      .def_readonly("edges_relaxed", &RouteResult::edges_relaxed);

  py::class_<CostBreakdown>(m, "CostBreakdown")
      .def_readonly("total", &CostBreakdown::total)
      .def_property_readonly("terms", [](const CostBreakdown& cb) {
        py::list out;
        for (const CostTerm& t : cb.terms) out.append(py::make_tuple(std::string(t.name), t.raw, t.weighted));
        return out;
      });

  py::class_<FilterPolicy>(m, "FilterPolicy")
      .def(py::init([](std::optional<double> max_latency, std::optional<double> min_reliability,
                       std::optional<double> min_availability, bool enabled) {
             return FilterPolicy{max_latency, min_reliability, min_availability, enabled};
           }),
           py::arg("max_latency") = py::none(), py::arg("min_reliability") = py::none(),
           py::arg("min_availability") = py::none(), py::arg("enabled") = true);

  py::class_<Cluster>(m, "Cluster")
      .def_readonly("id", &Cluster::id)
      .def_readonly("members", &Cluster::members)
      .def_readonly("head", &Cluster::head);
  py::class_<Clustering>(m, "Clustering")
      .def_readonly("clusters", &Clustering::clusters)
      .def_readonly("membership", &Clustering::membership);

  m.def("validate_graph", &validate_graph, py::arg("graph"));
  m.def(
      "compute_cost",
      [](const Task& task, const AgentNode& from, const AgentNode& to, const Link& link,
         const std::vector<double>& weights) {
        return compute_cost(task, from, to, link, to_weights(weights));
      },
      py::arg("task"), py::arg("source"), py::arg("target"), py::arg("link"), py::arg("weights"));
  m.def(
      "route",
      [](const AgentGraph& g, const Task& t, const std::vector<double>& w) {
        return optional_route(route(g, t, to_weights(w)));
      },
      py::arg("graph"), py::arg("task"), py::arg("weights"),
      "Minimum-cost route, or None when the destination is unreachable.");
  m.def(
      "exhaustive_best_path",
      [](const AgentGraph& g, const Task& t, const std::vector<double>& w) {
        return optional_route(exhaustive_best_path(g, t, to_weights(w)));
      },
      py::arg("graph"), py::arg("task"), py::arg("weights"));
  m.def(
      "random_instance",
      [](std::size_t nodes, double density, std::uint64_t seed) {
        Instance inst = random_instance(nodes, density, MetricRanges{}, seed);
        return py::make_tuple(inst.graph, inst.task,
                              std::vector<double>(inst.weights.w.begin(), inst.weights.w.end()));
      },
      py::arg("node_count"), py::arg("density"), py::arg("seed"));
  m.def("apply_filter",
        [](const AgentGraph& g, const FilterPolicy& p, const Task& t) { return apply_filter(g, p, t); },
        py::arg("graph"), py::arg("policy"), py::arg("task"));
  m.def("build_clustering", &build_clustering, py::arg("graph"), py::arg("k"), py::arg("seed") = 0);
  m.def(
      "route_hierarchical",
      [](const AgentGraph& g, const Clustering& c, const Task& t, const std::vector<double>& w) {
        return optional_route(route_hierarchical(g, c, t, to_weights(w)));
      },
      py::arg("graph"), py::arg("clustering"), py::arg("task"), py::arg("weights"));

  py::class_<Scenario>(m, "Scenario")
      .def_readonly("graph", &Scenario::graph)
      .def_readonly("names", &Scenario::names)
      .def_property_readonly("weights", [](const Scenario& s) {
        return std::vector<double>(s.weights.w.begin(), s.weights.w.end());
      })
      .def("to_yaml", &write_scenario)
      .def("node_id", [](const Scenario& s, const std::string& name) {
        auto id = lookup_node(s, name);
        if (!id) throw UnknownNode("unknown node '" + name + "'");
        return *id;
      });
  m.def("parse_scenario", [](const std::string& text) { return parse_scenario(text); }, py::arg("text"));
  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def(
      "simulate",
      [](const Scenario& s) {
        const RunReport report = run_scenario(s);
        const PolicyEcho policy = describe_policy(s);
        py::dict out;
        out["records"] = records_jsonl(report);
        out["summary"] = summary_json(report, s, policy);
        out["final_weights"] =
            std::vector<double>(report.final_weights.w.begin(), report.final_weights.w.end());
        return out;
      },
      py::arg("scenario"),
      "Runs the simulation; returns the JSONL records, the summary JSON and the final weights.");
  m.def(
      "verify",
      [](std::size_t max_nodes, std::size_t count, std::uint64_t seed) {
        const VerifyReport r = verify_batch(max_nodes, count, seed);
        return py::make_tuple(r.passed, r.failures.size());
      },
      py::arg("max_nodes") = 8, py::arg("instances") = 1000, py::arg("seed") = 1);

#ifdef VERSION_INFO
  m.attr("__version__") = MACRO_STRINGIFY(VERSION_INFO);
#else
  m.attr("__version__") = "dev";
#endif
}
