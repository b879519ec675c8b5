#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "apbda/model.hpp"
#include "apbda/outcome.hpp"
#include "apbda/random.hpp"

namespace apbda {

/// Network statistics summarising one window.
struct RLState {
  double avg_latency = 0.0;  // pooled mean latency per traversed hop
  double load_mean = 0.0;
  double load_stddev = 0.0;  // population standard deviation
  std::size_t reliability_incidents = 0;
  double priority_profile = 0.0;  // fraction of tasks with P >= threshold
  std::size_t task_count = 0;
};

/// Perturb weight `index` (0-based) by a factor of (1 + direction * step).
struct RLAction {
  std::size_t index = 0;
  int direction = +1;
  double step = 0.1;
};

struct RewardComponents {
  double hp_completion = 0.0;
  double fairness = 0.0;
  double reliability = 0.0;
};

struct RewardRecord {
  double reward = 0.0;
  RewardComponents components;
  std::int64_t window_id = 0;
};

/// Bucket edges (low, high) mapping each state field onto three levels:
/// value < low -> 0, value < high -> 1, otherwise 2.
struct StateBuckets {
  std::array<double, 2> avg_latency{5.0, 15.0};
  std::array<double, 2> load_stddev{0.1, 0.3};
  std::array<double, 2> incident_rate{0.02, 0.1};  // incidents / task_count
  std::array<double, 2> priority_profile{1.0 / 3.0, 2.0 / 3.0};
};

struct RLConfig {
  bool enabled = true;
  double eta = 0.1;
  double gamma_d = 0.9;
  double epsilon_start = 0.3;
  double epsilon_end = 0.05;
  double step = 0.1;
  std::size_t window = 100;
  double alpha = 0.5;
  double beta = 0.3;
  double gamma = 0.2;
  double w_min = 0.01;
  double w_max = 100.0;
  double high_priority_threshold = 5.0;
  /// Windows over which epsilon anneals linearly; 0 keeps epsilon_start.
  std::size_t anneal_windows = 300;
  StateBuckets buckets;

  std::vector<std::string> violations() const;
};

inline constexpr std::size_t kStateCount = 81;
inline constexpr std::size_t kActionCount = 2 * WeightVector::kSize;

/// Action id a <-> (index a / 2, direction + for even a, - for odd a).
RLAction action_from_id(std::size_t id, double step);
std::size_t action_id(const RLAction& action);

/// Dense Q table over the 81 discretised states and 14 actions.
class QTable {
 public:
  QTable() : values_(kStateCount * kActionCount, 0.0) {}

  double& at(std::size_t state, std::size_t action) { return values_[state * kActionCount + action]; }
  double at(std::size_t state, std::size_t action) const {
    return values_[state * kActionCount + action];
  }

  double max_value(std::size_t state) const;
  /// Lowest action id among the maxima.
  std::size_t argmax(std::size_t state) const;

  std::span<const double> values() const { return values_; }

  bool operator==(const QTable&) const = default;

 private:
  std::vector<double> values_;
};

/// Statistics of a window. Throws EmptyWindow when `window` is empty.
RLState observe_window(std::span<const TaskOutcome> window, std::span<const AgentNode> agents,
                       double high_priority_threshold);

/// Discretised state index in [0, 81).
std::size_t discretize(const RLState& state, const StateBuckets& buckets);

/// Gini coefficient rescaled by n / (n - 1) so that it spans [0, 1]. Zero
/// for fewer than two values or an all-zero vector.
double normalized_gini(std::span<const double> values);

/// Reward of a window:
///   hp_completion = 1 / (1 + mean completion time of successful tasks with
///                   P >= threshold); 1 without high-priority tasks, 0 when
///                   none of them succeeded,
///   fairness      = 1 - normalized Gini of agent load_factor,
///   reliability   = fraction of tasks that succeeded,
///   reward        = alpha * hp_completion + beta * fairness + gamma * reliability.
/// Throws EmptyWindow.
RewardRecord compute_reward(std::span<const TaskOutcome> window, std::span<const AgentNode> agents,
                            const RLConfig& config, std::int64_t window_id = 0);

/// Epsilon-greedy selection. Always consumes exactly one uniform draw for the
/// exploration gate, plus one more when exploring.
RLAction select_action(std::size_t state, const QTable& q, double epsilon, double step,
                       RandomStream& rng);

/// Tabular Q-learning update of the (state, action) entry only.
void q_update(QTable& q, std::size_t state, std::size_t action, double reward,
              std::size_t next_state, double eta, double gamma_d);

/// w[index] * (1 + direction * step), clamped to [w_min, w_max].
WeightVector apply_action(const WeightVector& weights, const RLAction& action, double w_min,
                          double w_max);

/// Drives one learning step per completed window.
class RLAdapter {
 public:
  RLAdapter(const RLConfig& config, const WeightVector& initial, std::uint64_t seed);

  /// Scores the window, learns from the previous action and, when adaptation
  /// is enabled, perturbs the weights for the next window.
  RewardRecord on_window(std::span<const TaskOutcome> window, std::span<const AgentNode> agents);

  const WeightVector& weights() const { return weights_; }
  const QTable& q_table() const { return q_; }
  std::int64_t windows_seen() const { return windows_; }
  double epsilon() const;
  const std::optional<RLAction>& last_action() const { return last_action_; }

 private:
  RLConfig config_;
  WeightVector weights_;
  QTable q_;
  RandomStream rng_;
  std::int64_t windows_ = 0;
  std::optional<std::size_t> last_state_;
  std::optional<RLAction> last_action_;
};

}  // namespace apbda
