#!/usr/bin/env python3
"""Recompute window rewards and summary statistics from a simulate run.

Reads the JSONL records and summary JSON written by `apbda simulate`, plus the
scenario YAML for the reward coefficients, and checks every figure from the
raw task outcomes alone. Exit status 0 when everything matches.
"""

import argparse
import json
import math
import sys

import yaml

TOL = 1e-12


def gini(values):
    n = len(values)
    total = sum(values)
    if n < 2 or total <= 0:
        return 0.0
    pairs = sum(abs(a - b) for a in values for b in values)
    return min(1.0, max(0.0, pairs / (2 * n * total) * n / (n - 1)))


def reward(window, loads, alpha, beta, gamma, threshold):
    high = [o for o in window if o["priority"] >= threshold]
    high_ok = [o["completion_time"] for o in high if o["succeeded"]]
    if not high:
        hp = 1.0
    elif not high_ok:
        hp = 0.0
    else:
        hp = 1.0 / (1.0 + sum(high_ok) / len(high_ok))
    fairness = 1.0 - gini(loads)
    reliability = sum(1 for o in window if o["succeeded"]) / len(window)
    return hp, fairness, reliability, alpha * hp + beta * fairness + gamma * reliability


def nearest_rank(sorted_values, q):
    if not sorted_values:
        return 0.0
    rank = max(1, math.ceil(q * len(sorted_values)))
    return sorted_values[rank - 1]


def close(a, b):
    return abs(a - b) <= TOL * max(1.0, abs(a), abs(b))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("scenario")
    parser.add_argument("records")
    parser.add_argument("summary")
    args = parser.parse_args(argv)

    with open(args.scenario) as f:
        rl = (yaml.safe_load(f) or {}).get("rl") or {}
    alpha = rl.get("alpha", 0.5)
    beta = rl.get("beta", 0.3)
    gamma = rl.get("gamma", 0.2)
    threshold = rl.get("high_priority_threshold", 5.0)

    outcomes, windows = [], []
    with open(args.records) as f:
        for line in f:
            record = json.loads(line)
            (outcomes if record["type"] == "task_outcome" else windows).append(record)
    with open(args.summary) as f:
        summary = json.load(f)

    problems = []
    for w in windows:
        window = outcomes[w["first_outcome"]: w["last_outcome"] + 1]
        hp, fair, rel, total = reward(window, w["agent_loads"], alpha, beta, gamma, threshold)
        for name, mine in (("hp_completion_term", hp), ("fairness_term", fair),
                           ("reliability_term", rel), ("reward", total)):
            if not close(mine, w[name]):
                problems.append(f"window {w['window_id']}: {name} {w[name]!r} != {mine!r}")

    ok_times = sorted(o["completion_time"] for o in outcomes if o["succeeded"])
    high_times = sorted(o["completion_time"] for o in outcomes
                        if o["succeeded"] and o["priority"] >= threshold)
    expected = {
        "tasks": len(outcomes),
        "succeeded": len(ok_times),
        "failed": sum(1 for o in outcomes if not o["succeeded"] and o["path"]),
        "unreachable": sum(1 for o in outcomes if not o["succeeded"] and not o["path"]),
        "windows": len(windows),
    }
    for key, value in expected.items():
        if summary[key] != value:
            problems.append(f"summary {key} {summary[key]} != {value}")
    for key, times in (("completion_time", ok_times), ("high_priority_completion_time", high_times)):
        stats = summary[key]
        mine = {"count": len(times), "mean": sum(times) / len(times) if times else 0.0,
                "p50": nearest_rank(times, 0.5), "p90": nearest_rank(times, 0.9),
                "p99": nearest_rank(times, 0.99)}
        for stat, value in mine.items():
            if not close(float(stats[stat]), float(value)):
                problems.append(f"summary {key}.{stat} {stats[stat]} != {value}")
    mean_reward = sum(w["reward"] for w in windows) / len(windows) if windows else 0.0
    if not close(summary["mean_reward"], mean_reward):
        problems.append(f"summary mean_reward {summary['mean_reward']} != {mean_reward}")

    for p in problems:
        print(p, file=sys.stderr)
    print(f"checked {len(outcomes)} outcomes, {len(windows)} windows: "
          f"{'ok' if not problems else f'{len(problems)} mismatches'}")
    return 0 if not problems else 1


if __name__ == "__main__":
    sys.exit(main())
