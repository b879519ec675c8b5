#pragma once

#include <optional>
#include <string>
#include <string_view>

#include "apbda/sim.hpp"

namespace apbda {

/// Parses a YAML scenario. Unknown keys, missing required blocks (nodes,
/// edges, weights) and invariant violations raise ScenarioError carrying the
/// offending line. Node names become dense ids in file order; edges marked
/// `symmetric: true` expand to both directions.
Scenario parse_scenario(std::string_view text);

/// Reads and parses a scenario file. I/O failures raise ScenarioError(0, ...).
Scenario load_scenario(const std::string& path);

/// Serialises a scenario in the format parse_scenario accepts. Numbers use
/// the shortest representation that reads back to the same double.
std::string write_scenario(const Scenario& scenario);

/// Resolves a node by name or, failing that, by numeric id.
std::optional<AgentId> lookup_node(const Scenario& scenario, std::string_view name_or_id);

/// Shortest round-trip text for a double.
std::string format_number(double value);

}  // namespace apbda
