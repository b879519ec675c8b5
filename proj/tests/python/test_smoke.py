import json
import os
import pathlib
import subprocess
import sys

import pytest

import apbda

SCENARIOS = pathlib.Path(os.environ.get("APBDA_SCENARIOS", pathlib.Path(__file__).parents[2] / "scenarios"))
ROOT = pathlib.Path(__file__).parents[2]
UNIFORM = [1.0] * 7


def test_worked_example_cost():
    task = apbda.Task(source=0, destination=1, complexity=4, priority=2)
    src = apbda.AgentNode(0)
    dst = apbda.AgentNode(1, capability=2, availability=0.5, load_factor=1, model_sophistication=2, reliability=0.5)
    link = apbda.Link(source=0, target=1, bandwidth=4, latency=3)
    cb = apbda.compute_cost(task, src, dst, link, UNIFORM)
    assert cb.total == pytest.approx(15.5)
    assert len(cb.terms) == 7
    assert sum(t[2] for t in cb.terms) == pytest.approx(cb.total)


def test_route_matches_oracle():
    for seed in range(50):
        graph, task, weights = apbda.random_instance(6, 0.5, seed)
        fast = apbda.route(graph, task, weights)
        slow = apbda.exhaustive_best_path(graph, task, weights)
        assert (fast is None) == (slow is None)
        if fast is not None:
            assert fast.total_cost == pytest.approx(slow.total_cost, rel=1e-9)
            assert fast.path[0] == task.source and fast.path[-1] == task.destination


def test_unreachable_and_errors():
    g = apbda.AgentGraph()
    g.add_node(apbda.AgentNode(0))
    g.add_node(apbda.AgentNode(1))
    g.add_link(apbda.Link(source=0, target=1))
    assert apbda.route(g, apbda.Task(1, 0), UNIFORM) is None
    with pytest.raises(apbda.UnknownNode):
        apbda.route(g, apbda.Task(0, 9), UNIFORM)
    with pytest.raises(apbda.InvalidK):
        apbda.build_clustering(g, 3)
    with pytest.raises(apbda.ScenarioError):
        apbda.parse_scenario("nodes: []\nbogus: 1\n")


def test_filter_and_hierarchy():
    graph, task, weights = apbda.random_instance(12, 0.4, 3)
    policy = apbda.FilterPolicy(min_reliability=0.7)
    pruned = apbda.apply_filter(graph, policy, task)
    assert pruned.node_count <= graph.node_count
    clustering = apbda.build_clustering(graph, 3, seed=1)
    assert sorted(m for c in clustering.clusters for m in c.members) == graph.node_ids()
    flat = apbda.route(graph, task, weights)
    hier = apbda.route_hierarchical(graph, clustering, task, weights)
    if flat is not None and hier is not None:
        assert hier.total_cost >= flat.total_cost * (1 - 1e-9)


def test_scenario_round_trip_and_simulate():
    scenario = apbda.load_scenario(str(SCENARIOS / "demo.yaml"))
    again = apbda.parse_scenario(scenario.to_yaml())
    assert again.names == scenario.names
    assert again.weights == scenario.weights
    assert scenario.node_id("planner") == 1

    a = apbda.simulate(scenario)
    b = apbda.simulate(scenario)
    assert a["records"] == b["records"]
    summary = json.loads(a["summary"])
    assert summary["tasks"] == sum(1 for line in a["records"].splitlines() if '"task_outcome"' in line)
    assert len(a["final_weights"]) == 7


def test_verify():
    passed, failed = apbda.verify(max_nodes=6, instances=60, seed=2)
    assert (passed, failed) == (60, 0)


def test_recompute_report_script(tmp_path):
    cli = os.environ.get("APBDA_CLI")
    if not cli:
        pytest.skip("APBDA_CLI not set")
    records, summary = tmp_path / "r.jsonl", tmp_path / "s.json"
    scenario = SCENARIOS / "demo.yaml"
    subprocess.run([cli, "simulate", str(scenario), "--records", str(records), "--summary", str(summary)],
                   check=True, capture_output=True)
    result = subprocess.run([sys.executable, str(ROOT / "tools" / "recompute_report.py"), str(scenario),
                             str(records), str(summary)], capture_output=True, text=True)
    assert result.returncode == 0, result.stderr
    assert "ok" in result.stdout
