#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "rl/env.hpp"
#include "rl/rng.hpp"

namespace rl {

// Dense [state_count x action_count] action-value table, zero-initialized.
using QTable = Eigen::MatrixXd;

struct TabularParams {
  double learning_rate = 0.1;
  double discount = 0.95;
  double epsilon_initial = 1.0;
  double epsilon_floor = 0.1;
  double epsilon_decay = 0.995;
  int decay_warmup_episodes = 200;  // decay starts after this many episodes
  int episodes = 5000;
};

void validate(const TabularParams& params);

// Argmax with ties broken by lowest index, fixed for reproducibility.
template <class Derived>
int greedy_action(const Eigen::MatrixBase<Derived>& q_row) {
  const Eigen::Index n = q_row.size();
  Eigen::Index best = 0;
  for (Eigen::Index a = 1; a < n; ++a) {
    if (q_row[a] > q_row[best]) best = a;
  }
  return static_cast<int>(best);
}

// With probability epsilon a uniform action, otherwise the greedy one.
template <class Derived>
int epsilon_greedy(const Eigen::MatrixBase<Derived>& q_row, double epsilon,
                   Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::invalid_argument("epsilon must lie in [0,1]");
  }
  if (q_row.size() == 0) throw std::invalid_argument("empty action-value row");
  if (rng.uniform() < epsilon) {
    return static_cast<int>(
        rng.uniform_int(static_cast<std::uint64_t>(q_row.size())));
  }
  return greedy_action(q_row);
}

inline double decay_epsilon(double epsilon, double decay, double floor) {
  return std::max(floor, epsilon * decay);
}

// One temporal-difference update in place; returns the new Q(s,a). The
// bootstrap term is dropped on terminal transitions.
double q_update(QTable& q, int state, int action, double reward,
                int next_state, bool done, double alpha, double gamma);

struct TabularResult {
  QTable q;
  std::vector<double> episode_rewards;
  std::vector<double> episode_epsilons;  // value in effect during the episode
  std::vector<double> table_diffs;       // max |Q_i - Q_{i-1}| per episode
};

TabularResult train_tabular(Env& env, const TabularParams& params, Rng& rng);

struct EvalStats {
  double penalties_per_episode = 0.0;  // steps with reward == -10
  double timesteps_per_trip = 0.0;     // mean episode length
  double reward_per_move = 0.0;        // total reward / total steps
  double mean_return = 0.0;            // mean episode total reward
};

EvalStats evaluate(Env& env, const Policy& policy, int episodes, Rng& rng);

Policy random_policy(const EnvDescriptor& desc);
Policy greedy_policy(QTable q);

// Exact transition model for value iteration: deterministic, enumerable.
struct ModelStep {
  int next_state = 0;
  double reward = 0.0;
  bool done = false;
};
using TransitionModel = std::function<ModelStep(int state, int action)>;

// Sweeps Q(s,a) <- r + gamma * max_a' Q(s',a') (bootstrap zero when done)
// until the max change drops below tol. Optionally records per-sweep diffs.
QTable value_iteration_oracle(const TransitionModel& model, int state_count,
                              int action_count, double gamma, double tol,
                              std::vector<double>* sweep_diffs = nullptr);

}  // namespace rl
