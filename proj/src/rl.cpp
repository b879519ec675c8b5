#include "apbda/rl.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "apbda/errors.hpp"

namespace apbda {

namespace {

std::size_t level(double value, const std::array<double, 2>& edges) {
  if (value < edges[0]) return 0;
  if (value < edges[1]) return 1;
  return 2;
}

}  // namespace

std::vector<std::string> RLConfig::violations() const {
  std::vector<std::string> out;
  if (!(eta >= 0.0 && eta <= 1.0)) out.push_back("rl.eta must be in [0, 1]");
  if (!(gamma_d >= 0.0 && gamma_d < 1.0)) out.push_back("rl.gamma_d must be in [0, 1)");
  if (!(epsilon_start >= 0.0 && epsilon_start <= 1.0)) out.push_back("rl.epsilon_start must be in [0, 1]");
  if (!(epsilon_end >= 0.0 && epsilon_end <= 1.0)) out.push_back("rl.epsilon_end must be in [0, 1]");
  if (!(step >= 0.0 && step < 1.0)) out.push_back("rl.step must be in [0, 1)");
  if (window == 0) out.push_back("rl.window must be >= 1");
  if (!(alpha >= 0.0 && beta >= 0.0 && gamma >= 0.0)) out.push_back("rl.alpha/beta/gamma must be >= 0");
  if (!(w_min > 0.0 && w_max >= w_min && std::isfinite(w_max))) {
    out.push_back("rl.w_min must be > 0 and rl.w_max >= rl.w_min");
  }
  if (!(high_priority_threshold > 0.0)) out.push_back("rl.high_priority_threshold must be > 0");
  return out;
}

RLAction action_from_id(std::size_t id, double step) {
  return RLAction{id / 2, id % 2 == 0 ? +1 : -1, step};
}

std::size_t action_id(const RLAction& action) {
  return 2 * action.index + (action.direction > 0 ? 0 : 1);
}

double QTable::max_value(std::size_t state) const { return at(state, argmax(state)); }

std::size_t QTable::argmax(std::size_t state) const {
  std::size_t best = 0;
  for (std::size_t a = 1; a < kActionCount; ++a) {
    if (at(state, a) > at(state, best)) best = a;
  }
  return best;
}

RLState observe_window(std::span<const TaskOutcome> window, std::span<const AgentNode> agents,
                       double high_priority_threshold) {
  if (window.empty()) throw EmptyWindow("window contains no completed tasks");
  RLState s;
  s.task_count = window.size();

  double latency = 0.0;
  std::size_t hops = 0;
  std::size_t high = 0;
  for (const TaskOutcome& o : window) {
    latency += o.latency_traversed;
    hops += o.hops_traversed;
    if (!o.succeeded) ++s.reliability_incidents;
    if (o.priority >= high_priority_threshold) ++high;
  }
  s.avg_latency = hops > 0 ? latency / static_cast<double>(hops) : 0.0;
  s.priority_profile = static_cast<double>(high) / static_cast<double>(window.size());

  if (!agents.empty()) {
    double sum = 0.0;
    for (const AgentNode& a : agents) sum += a.load_factor;
    s.load_mean = sum / static_cast<double>(agents.size());
    double sq = 0.0;
    for (const AgentNode& a : agents) sq += (a.load_factor - s.load_mean) * (a.load_factor - s.load_mean);
    s.load_stddev = std::sqrt(sq / static_cast<double>(agents.size()));
  }
  return s;
}

std::size_t discretize(const RLState& state, const StateBuckets& buckets) {
  const double incident_rate =
      state.task_count > 0
          ? static_cast<double>(state.reliability_incidents) / static_cast<double>(state.task_count)
          : 0.0;
  return level(state.avg_latency, buckets.avg_latency) +
         3 * level(state.load_stddev, buckets.load_stddev) +
         9 * level(incident_rate, buckets.incident_rate) +
         27 * level(state.priority_profile, buckets.priority_profile);
}

double normalized_gini(std::span<const double> values) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double sum = 0.0;
  for (double v : values) sum += v;
  if (!(sum > 0.0)) return 0.0;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  // Sum over pairs |x_i - x_j| = 2 * sum_i (2i - n + 1) x_(i) for sorted x.
  double weighted = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    weighted += (2.0 * static_cast<double>(i) - static_cast<double>(n) + 1.0) * sorted[i];
  }
  const double gini = weighted / (static_cast<double>(n) * sum);
  const double normalized = gini * static_cast<double>(n) / static_cast<double>(n - 1);
  return std::clamp(normalized, 0.0, 1.0);
}

RewardRecord compute_reward(std::span<const TaskOutcome> window, std::span<const AgentNode> agents,
                            const RLConfig& config, std::int64_t window_id) {
  if (window.empty()) throw EmptyWindow("window contains no completed tasks");

  std::size_t high = 0;
  std::size_t high_done = 0;
  double high_time = 0.0;
  std::size_t succeeded = 0;
  for (const TaskOutcome& o : window) {
    if (o.succeeded) ++succeeded;
    if (o.priority >= config.high_priority_threshold) {
      ++high;
      if (o.succeeded) {
        ++high_done;
        high_time += static_cast<double>(o.completion_time);
      }
    }
  }

  RewardRecord r;
  r.window_id = window_id;
  if (high == 0) {
    r.components.hp_completion = 1.0;
  } else if (high_done == 0) {
    r.components.hp_completion = 0.0;
  } else {
    r.components.hp_completion = 1.0 / (1.0 + high_time / static_cast<double>(high_done));
  }
  std::vector<double> loads;
  loads.reserve(agents.size());
  for (const AgentNode& a : agents) loads.push_back(a.load_factor);
  r.components.fairness = 1.0 - normalized_gini(loads);
  r.components.reliability = static_cast<double>(succeeded) / static_cast<double>(window.size());
  r.reward = config.alpha * r.components.hp_completion + config.beta * r.components.fairness +
             config.gamma * r.components.reliability;
  return r;
}

RLAction select_action(std::size_t state, const QTable& q, double epsilon, double step,
                       RandomStream& rng) {
  if (rng.uniform01() < epsilon) {
    return action_from_id(static_cast<std::size_t>(rng.uniform_index(kActionCount)), step);
  }
  return action_from_id(q.argmax(state), step);
}

void q_update(QTable& q, std::size_t state, std::size_t action, double reward,
              std::size_t next_state, double eta, double gamma_d) {
  double& entry = q.at(state, action);
  entry = entry + eta * (reward + gamma_d * q.max_value(next_state) - entry);
}

WeightVector apply_action(const WeightVector& weights, const RLAction& action, double w_min,
                          double w_max) {
  WeightVector out = weights;
  const double scaled = out[action.index] * (1.0 + static_cast<double>(action.direction) * action.step);
  out[action.index] = std::clamp(scaled, w_min, w_max);
  return out;
}

RLAdapter::RLAdapter(const RLConfig& config, const WeightVector& initial, std::uint64_t seed)
    : config_(config), weights_(initial), rng_(seed) {}

double RLAdapter::epsilon() const {
  if (config_.anneal_windows <= 1) return config_.epsilon_start;
  const double progress = std::min(
      1.0, static_cast<double>(windows_) / static_cast<double>(config_.anneal_windows - 1));
  return config_.epsilon_start + (config_.epsilon_end - config_.epsilon_start) * progress;
}

RewardRecord RLAdapter::on_window(std::span<const TaskOutcome> window,
                                  std::span<const AgentNode> agents) {
  const RLState state = observe_window(window, agents, config_.high_priority_threshold);
  const std::size_t s = discretize(state, config_.buckets);
  RewardRecord record = compute_reward(window, agents, config_, windows_);

  if (config_.enabled) {
    if (last_state_ && last_action_) {
      q_update(q_, *last_state_, action_id(*last_action_), record.reward, s, config_.eta,
               config_.gamma_d);
    }
    const RLAction action = select_action(s, q_, epsilon(), config_.step, rng_);
    weights_ = apply_action(weights_, action, config_.w_min, config_.w_max);
    last_state_ = s;
    last_action_ = action;
  }
  ++windows_;
  return record;
}

}  // namespace apbda
