#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "apbda/errors.hpp"
#include "apbda/rl.hpp"
#include "helpers.hpp"

using namespace apbda;
using apbda::test::make_node;

namespace {

TaskOutcome outcome(double priority, bool ok, Tick time, std::size_t hops, double latency) {
  TaskOutcome o;
  o.priority = priority;
  o.succeeded = ok;
  o.completion_time = time;
  o.hops_traversed = hops;
  o.latency_traversed = latency;
  if (!ok) o.failure_node = 0;
  return o;
}

}  // namespace

TEST_CASE("observe_window: single-sample statistics") {
  const std::vector<TaskOutcome> w{outcome(1.0, true, 3, 2, 6.0)};
  const std::vector<AgentNode> agents{make_node(0, 1.0, 1.0, 0.5)};
  const RLState s = observe_window(w, agents, 5.0);
  CHECK(s.load_mean == 0.5);
  CHECK(s.load_stddev == 0.0);
  CHECK(s.avg_latency == 3.0);
  CHECK(s.reliability_incidents == 0);
  CHECK(s.priority_profile == 0.0);
}

TEST_CASE("observe_window: all high priority and empty window") {
  const std::vector<TaskOutcome> w{outcome(5.0, true, 1, 1, 1.0), outcome(9.0, false, 1, 0, 0.0)};
  const std::vector<AgentNode> agents{make_node(0), make_node(1)};
  const RLState s = observe_window(w, agents, 5.0);
  CHECK(s.priority_profile == 1.0);
  CHECK(s.reliability_incidents == 1);
  CHECK_THROWS_AS(observe_window(std::vector<TaskOutcome>{}, agents, 5.0), EmptyWindow);
  CHECK_THROWS_AS(compute_reward(std::vector<TaskOutcome>{}, agents, RLConfig{}), EmptyWindow);
}

TEST_CASE("observe_window and compute_reward: 100-task window recomputed by hand") {
  RandomStream rng(4242);
  std::vector<TaskOutcome> w;
  for (int i = 0; i < 100; ++i) {
    const std::size_t hops = rng.uniform_index(5);
    double lat = 0.0;
    for (std::size_t h = 0; h < hops; ++h) lat += std::floor(rng.uniform(0.0, 30.0));
    w.push_back(outcome(rng.uniform(0.5, 10.0), rng.bernoulli(0.85),
                        static_cast<Tick>(rng.uniform_index(60)), hops, lat));
  }
  std::vector<AgentNode> agents;
  for (AgentId i = 0; i < 7; ++i) agents.push_back(make_node(i, 1.0, 1.0, rng.uniform(0.0, 1.5)));

  // Independent recomputation in the most literal form.
  double lat_sum = 0.0, hop_sum = 0.0, hp_time = 0.0;
  int incidents = 0, high = 0, high_ok = 0, ok = 0;
  for (const auto& o : w) {
    lat_sum += o.latency_traversed;
    hop_sum += static_cast<double>(o.hops_traversed);
    incidents += o.succeeded ? 0 : 1;
    ok += o.succeeded ? 1 : 0;
    if (o.priority >= 5.0) {
      ++high;
      if (o.succeeded) {
        ++high_ok;
        hp_time += static_cast<double>(o.completion_time);
      }
    }
  }
  double mean = 0.0;
  for (const auto& a : agents) mean += a.load_factor / 7.0;
  double var = 0.0;
  for (const auto& a : agents) var += (a.load_factor - mean) * (a.load_factor - mean) / 7.0;
  double abs_diff = 0.0, total = 0.0;
  for (const auto& a : agents) {
    total += a.load_factor;
    for (const auto& b : agents) abs_diff += std::fabs(a.load_factor - b.load_factor);
  }
  const double gini = abs_diff / (2.0 * 7.0 * total) * 7.0 / 6.0;

  const RLState s = observe_window(w, agents, 5.0);
  CHECK(s.task_count == 100);
  CHECK(s.avg_latency == doctest::Approx(lat_sum / hop_sum).epsilon(1e-12));
  CHECK(s.load_mean == doctest::Approx(mean).epsilon(1e-12));
  CHECK(s.load_stddev == doctest::Approx(std::sqrt(var)).epsilon(1e-12));
  CHECK(s.reliability_incidents == static_cast<std::size_t>(incidents));
  CHECK(s.priority_profile == doctest::Approx(high / 100.0));

  const RLConfig cfg;
  const RewardRecord r = compute_reward(w, agents, cfg, 7);
  CHECK(r.window_id == 7);
  CHECK(r.components.hp_completion == doctest::Approx(1.0 / (1.0 + hp_time / high_ok)).epsilon(1e-12));
  CHECK(r.components.fairness == doctest::Approx(1.0 - gini).epsilon(1e-12));
  CHECK(r.components.reliability == doctest::Approx(ok / 100.0));
  CHECK(r.reward == cfg.alpha * r.components.hp_completion + cfg.beta * r.components.fairness +
                        cfg.gamma * r.components.reliability);
}

TEST_CASE("compute_reward: boundary components") {
  RLConfig cfg;
  cfg.alpha = 0.25;
  cfg.beta = 0.5;
  cfg.gamma = 2.0;
  const std::vector<AgentNode> even{make_node(0, 1, 1, 0.3), make_node(1, 1, 1, 0.3)};
  const std::vector<TaskOutcome> instant{outcome(9.0, true, 0, 1, 1.0), outcome(6.0, true, 0, 1, 1.0)};
  const RewardRecord r = compute_reward(instant, even, cfg);
  CHECK(r.components.hp_completion == 1.0);
  CHECK(r.components.fairness == 1.0);
  CHECK(r.components.reliability == 1.0);
  CHECK(r.reward == 0.25 + 0.5 + 2.0);

  const std::vector<TaskOutcome> low{outcome(1.0, true, 40, 1, 1.0), outcome(2.0, false, 3, 0, 0.0)};
  const RewardRecord lr = compute_reward(low, even, cfg);
  CHECK(lr.components.hp_completion == 1.0);
  CHECK(lr.components.reliability == 0.5);

  const std::vector<TaskOutcome> failed_hp{outcome(8.0, false, 3, 0, 0.0)};
  CHECK(compute_reward(failed_hp, even, cfg).components.hp_completion == 0.0);

  const std::vector<AgentNode> skewed{make_node(0, 1, 1, 0.0), make_node(1, 1, 1, 1.0)};
  CHECK(compute_reward(instant, skewed, cfg).components.fairness == 0.0);
}

TEST_CASE("normalized_gini") {
  CHECK(normalized_gini(std::vector<double>{}) == 0.0);
  CHECK(normalized_gini(std::vector<double>{4.0}) == 0.0);
  CHECK(normalized_gini(std::vector<double>{0.0, 0.0, 0.0}) == 0.0);
  CHECK(normalized_gini(std::vector<double>{2.0, 2.0, 2.0}) == 0.0);
  CHECK(normalized_gini(std::vector<double>{0.0, 0.0, 5.0}) == doctest::Approx(1.0));
}

TEST_CASE("discretize covers 81 states") {
  StateBuckets b;
  std::vector<bool> seen(kStateCount, false);
  const double lat[] = {1.0, 10.0, 20.0};
  const double sd[] = {0.0, 0.2, 0.5};
  const std::size_t inc[] = {0, 5, 50};
  const double prof[] = {0.0, 0.5, 1.0};
  for (double a : lat) {
    for (double b2 : sd) {
      for (std::size_t c : inc) {
        for (double d : prof) {
          RLState s;
          s.avg_latency = a;
          s.load_stddev = b2;
          s.reliability_incidents = c;
          s.priority_profile = d;
          s.task_count = 100;
          const std::size_t idx = discretize(s, b);
          REQUIRE(idx < kStateCount);
          CHECK_FALSE(seen[idx]);
          seen[idx] = true;
        }
      }
    }
  }
}

TEST_CASE("select_action: epsilon 1 is uniform over the 14 actions") {
  RandomStream rng(99);
  QTable q;
  q.at(0, 5) = 10.0;
  std::vector<int> counts(kActionCount, 0);
  const int draws = 10000;
  for (int i = 0; i < draws; ++i) ++counts[action_id(select_action(0, q, 1.0, 0.1, rng))];
  for (int c : counts) CHECK(std::fabs(static_cast<double>(c) / draws - 1.0 / kActionCount) <= 0.02);
}

TEST_CASE("select_action: epsilon 0 is greedy with lowest-index ties") {
  RandomStream rng(1);
  QTable q;
  const RLAction tie = select_action(3, q, 0.0, 0.1, rng);
  CHECK(tie.index == 0);
  CHECK(tie.direction == +1);

  q.at(3, 9) = 0.4;
  q.at(3, 11) = 0.4;
  q.at(3, 2) = 0.1;
  for (int i = 0; i < 20; ++i) {
    const RLAction a = select_action(3, q, 0.0, 0.1, rng);
    CHECK(action_id(a) == 9);
    CHECK(a.index == 4);
    CHECK(a.direction == -1);
  }
}

TEST_CASE("q_update examples") {
  QTable q;
  q.at(2, 3) = 0.7;
  q.at(5, 1) = 2.0;
  const QTable before = q;
  q_update(q, 2, 3, 1.0, 5, 0.0, 0.9);
  CHECK(q == before);

  QTable z;
  q_update(z, 4, 6, 0.8, 10, 1.0, 0.0);
  CHECK(z.at(4, 6) == 0.8);

  q_update(q, 2, 3, 1.0, 5, 0.5, 0.5);
  CHECK(q.at(2, 3) == doctest::Approx(0.7 + 0.5 * (1.0 + 0.5 * 2.0 - 0.7)));
  for (std::size_t s = 0; s < kStateCount; ++s) {
    for (std::size_t a = 0; a < kActionCount; ++a) {
      if (!(s == 2 && a == 3)) CHECK(q.at(s, a) == before.at(s, a));
    }
  }
}

TEST_CASE("apply_action examples") {
  const WeightVector w = WeightVector::uniform();
  CHECK(apply_action(w, RLAction{3, +1, 0.0}, 0.01, 100.0) == w);
  const WeightVector up = apply_action(w, RLAction{3, +1, 0.1}, 0.01, 100.0);
  CHECK(up[3] == doctest::Approx(1.1));
  for (std::size_t i = 0; i < WeightVector::kSize; ++i) {
    if (i != 3) CHECK(up[i] == 1.0);
  }
  CHECK(apply_action(w, RLAction{0, +1, 0.5}, 0.01, 1.2)[0] == 1.2);
  CHECK(apply_action(w, RLAction{0, -1, 0.5}, 0.8, 100.0)[0] == 0.8);
}

TEST_CASE("apply_action: random action sequences stay in bounds") {
  RandomStream rng(12);
  WeightVector w = WeightVector::uniform();
  for (int i = 0; i < 20000; ++i) {
    const RLAction a = action_from_id(rng.uniform_index(kActionCount), 0.3);
    w = apply_action(w, a, 0.01, 100.0);
    for (double v : w.w) {
      REQUIRE(v >= 0.01);
      REQUIRE(v <= 100.0);
    }
    REQUIRE(w.valid());
  }
}

TEST_CASE("RLAdapter: reproducible for identical seeds and windows") {
  auto drive = [](std::uint64_t seed) {
    RLConfig cfg;
    cfg.anneal_windows = 50;
    RLAdapter adapter(cfg, WeightVector::uniform(), seed);
    RandomStream data(5);
    std::vector<std::size_t> actions;
    for (int k = 0; k < 60; ++k) {
      std::vector<TaskOutcome> w;
      for (int i = 0; i < 10; ++i) {
        w.push_back(outcome(data.uniform(0.5, 10.0), data.bernoulli(0.9),
                            static_cast<Tick>(data.uniform_index(20)), 2, data.uniform(0.0, 20.0)));
      }
      std::vector<AgentNode> agents{make_node(0, 1, 1, data.uniform(0, 1)),
                                    make_node(1, 1, 1, data.uniform(0, 1))};
      adapter.on_window(w, agents);
      actions.push_back(action_id(*adapter.last_action()));
    }
    return std::make_tuple(actions, adapter.q_table(), adapter.weights());
  };
  CHECK(drive(3) == drive(3));
  CHECK(std::get<0>(drive(3)) != std::get<0>(drive(4)));
}

TEST_CASE("RLAdapter: epsilon anneals linearly and disabled adapter keeps weights") {
  RLConfig cfg;
  cfg.anneal_windows = 11;
  RLAdapter adapter(cfg, WeightVector::uniform(), 1);
  const std::vector<TaskOutcome> w{outcome(1.0, true, 1, 1, 1.0)};
  const std::vector<AgentNode> agents{make_node(0)};
  CHECK(adapter.epsilon() == doctest::Approx(0.3));
  for (int i = 0; i < 5; ++i) adapter.on_window(w, agents);
  CHECK(adapter.epsilon() == doctest::Approx(0.175));
  for (int i = 0; i < 10; ++i) adapter.on_window(w, agents);
  CHECK(adapter.epsilon() == doctest::Approx(0.05));

  cfg.enabled = false;
  RLAdapter frozen(cfg, WeightVector::uniform(2.0), 1);
  for (int i = 0; i < 5; ++i) {
    const RewardRecord r = frozen.on_window(w, agents);
    CHECK(r.window_id == i);
  }
  CHECK(frozen.weights() == WeightVector::uniform(2.0));
  CHECK_FALSE(frozen.last_action().has_value());
}

TEST_CASE("RLConfig validation") {
  CHECK(RLConfig{}.violations().empty());
  RLConfig bad;
  bad.eta = 1.5;
  bad.window = 0;
  bad.w_min = 0.0;
  CHECK(bad.violations().size() == 3);
}
