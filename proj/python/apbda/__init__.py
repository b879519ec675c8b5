"""Priority-aware adaptive routing for simulated agent networks."""

from ._core import (
    AgentGraph,
    AgentNode,
    Clustering,
    CostBreakdown,
    EmptyWindow,
    Error,
    FilterPolicy,
    InvalidK,
    InvalidMetric,
    InvalidParams,
    Link,
    RouteResult,
    Scenario,
    ScenarioError,
    Task,
    TooLarge,
    UnknownNode,
    __version__,
    apply_filter,
    build_clustering,
    compute_cost,
    exhaustive_best_path,
    load_scenario,
    parse_scenario,
    random_instance,
    route,
    route_hierarchical,
    simulate,
    validate_graph,
    verify,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
