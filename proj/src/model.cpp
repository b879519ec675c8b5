#include "apbda/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "apbda/errors.hpp"

namespace apbda {

namespace {

std::string fmt_value(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string node_label(AgentId id) { return "node " + std::to_string(id); }

std::string link_label(const Link& link) {
  return "edge " + std::to_string(link.from) + "->" + std::to_string(link.to);
}

}  // namespace

void AgentGraph::add_node(const AgentNode& node) {
  if (!nodes_.emplace(node.id, node).second) {
    throw InvalidParams("duplicate node id " + std::to_string(node.id));
  }
}

void AgentGraph::update_node(const AgentNode& node) {
  auto it = nodes_.find(node.id);
  if (it == nodes_.end()) throw UnknownNode("unknown node id " + std::to_string(node.id));
  it->second = node;
}

void AgentGraph::add_link(const Link& link) {
  auto& out = adjacency_[link.from];
  auto pos = std::upper_bound(out.begin(), out.end(), link.to,
                              [](AgentId to, const Link& l) { return to < l.to; });
  out.insert(pos, link);
  ++link_count_;
}

const AgentNode& AgentGraph::node(AgentId id) const {
  auto it = nodes_.find(id);
  if (it == nodes_.end()) throw UnknownNode("unknown node id " + std::to_string(id));
  return it->second;
}

std::span<const Link> AgentGraph::out_links(AgentId id) const {
  auto it = adjacency_.find(id);
  if (it == adjacency_.end()) return {};
  return it->second;
}

const Link* AgentGraph::find_link(AgentId from, AgentId to) const {
  for (const Link& l : out_links(from)) {
    if (l.to == to) return &l;
    if (l.to > to) break;
  }
  return nullptr;
}

std::vector<Link> AgentGraph::links() const {
  std::vector<Link> out;
  out.reserve(link_count_);
  for (const auto& [from, list] : adjacency_) out.insert(out.end(), list.begin(), list.end());
  return out;
}

std::vector<AgentId> AgentGraph::node_ids() const {
  std::vector<AgentId> ids;
  ids.reserve(nodes_.size());
  for (const auto& [id, node] : nodes_) ids.push_back(id);
  return ids;
}

AgentGraph AgentGraph::induced(std::span<const AgentId> keep) const {
  std::set<AgentId> kept;
  for (AgentId id : keep) {
    if (contains(id)) kept.insert(id);
  }
  AgentGraph out;
  for (AgentId id : kept) out.add_node(nodes_.at(id));
  for (const auto& [from, list] : adjacency_) {
    if (!kept.count(from)) continue;
    for (const Link& l : list) {
      if (kept.count(l.to)) out.add_link(l);
    }
  }
  return out;
}

bool WeightVector::valid() const {
  bool any_positive = false;
  for (double v : w) {
    if (!std::isfinite(v) || v < 0.0) return false;
    any_positive = any_positive || v > 0.0;
  }
  return any_positive;
}

std::vector<std::string> validate_node(const AgentNode& n) {
  std::vector<std::string> out;
  const std::string who = node_label(n.id);
  if (n.id < 0) out.push_back(who + ": id must be non-negative");
  if (!(n.capability > 0.0) || !std::isfinite(n.capability)) {
    out.push_back(who + ": capability must be > 0 (got " + fmt_value(n.capability) + ")");
  }
  if (!(n.availability > 0.0 && n.availability <= 1.0)) {
    out.push_back(who + ": availability must be in (0, 1] (got " + fmt_value(n.availability) + ")");
  }
  if (!(n.load_factor >= 0.0) || !std::isfinite(n.load_factor)) {
    out.push_back(who + ": load_factor must be >= 0 (got " + fmt_value(n.load_factor) + ")");
  }
  if (!(n.model_sophistication > 0.0) || !std::isfinite(n.model_sophistication)) {
    out.push_back(who + ": model_sophistication must be > 0 (got " +
                  fmt_value(n.model_sophistication) + ")");
  }
  if (!(n.reliability > 0.0 && n.reliability <= 1.0)) {
    out.push_back(who + ": reliability must be in (0, 1] (got " + fmt_value(n.reliability) + ")");
  }
  return out;
}

std::vector<std::string> validate_link(const Link& l) {
  std::vector<std::string> out;
  const std::string who = link_label(l);
  if (!(l.bandwidth > 0.0) || !std::isfinite(l.bandwidth)) {
    out.push_back(who + ": bandwidth must be > 0 (got " + fmt_value(l.bandwidth) + ")");
  }
  if (!(l.latency >= 0.0) || !std::isfinite(l.latency)) {
    out.push_back(who + ": latency must be >= 0 (got " + fmt_value(l.latency) + ")");
  }
  if (l.from == l.to) out.push_back(who + ": self-loop");
  return out;
}

std::vector<std::string> validate_graph(const AgentGraph& graph) {
  std::vector<std::string> out;
  for (const auto& [id, node] : graph.nodes()) {
    auto v = validate_node(node);
    out.insert(out.end(), v.begin(), v.end());
  }
  const std::vector<Link> links = graph.links();
  for (std::size_t i = 0; i < links.size(); ++i) {
    const Link& l = links[i];
    auto v = validate_link(l);
    out.insert(out.end(), v.begin(), v.end());
    if (!graph.contains(l.from)) {
      out.push_back(link_label(l) + ": endpoint " + std::to_string(l.from) + " is not a node");
    }
    if (!graph.contains(l.to)) {
      out.push_back(link_label(l) + ": endpoint " + std::to_string(l.to) + " is not a node");
    }
    // links() is sorted by (from, to), so duplicates are adjacent.
    if (i > 0 && links[i - 1].from == l.from && links[i - 1].to == l.to) {
      out.push_back(link_label(l) + ": duplicate link for ordered pair");
    }
  }
  return out;
}

std::vector<std::string> validate_task(const Task& t, const AgentGraph& graph) {
  std::vector<std::string> out;
  const std::string who = "task " + std::to_string(t.id);
  if (!(t.complexity > 0.0) || !std::isfinite(t.complexity)) {
    out.push_back(who + ": complexity must be > 0");
  }
  if (!(t.priority > 0.0) || !std::isfinite(t.priority)) {
    out.push_back(who + ": priority must be > 0");
  }
  if (!graph.contains(t.source)) out.push_back(who + ": unknown source " + std::to_string(t.source));
  if (!graph.contains(t.destination)) {
    out.push_back(who + ": unknown destination " + std::to_string(t.destination));
  }
  return out;
}

}  // namespace apbda
