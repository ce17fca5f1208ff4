#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "rl/env.hpp"
#include "rl/net.hpp"
#include "rl/rng.hpp"

namespace rl {

// Fixed-capacity FIFO ring; pushing at capacity evicts the oldest element.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  std::size_t size() const { return size_; }
  std::size_t capacity() const { return storage_.size(); }

  void push(Transition t);

  // i = 0 is the oldest stored transition.
  const Transition& at(std::size_t i) const;

 private:
  std::vector<Transition> storage_;
  std::size_t head_ = 0;  // insertion slot
  std::size_t size_ = 0;
};

// batch_size distinct positions, uniform without replacement.
std::vector<Transition> sample_minibatch(const ReplayBuffer& buffer,
                                         int batch_size, Rng& rng);

enum class DqnVariant { Dqn, Ddqn };

struct ExplorationSchedule {
  enum class Kind { MultiplicativePerReplay, LinearByTimestep };
  Kind kind = Kind::MultiplicativePerReplay;
  double initial = 1.0;
  double final_value = 0.001;
  double decay = 0.995;   // multiplicative path, applied once per replay call
  double fraction = 0.1;  // linear path: reaches final after this fraction of
                          // the timestep budget

  double after_replay(double epsilon) const {
    if (kind != Kind::MultiplicativePerReplay) return epsilon;
    return std::max(final_value, epsilon * decay);
  }
  double by_timestep(long long t, long long horizon) const {
    const double progress =
        std::min(1.0, static_cast<double>(t) /
                          (fraction * static_cast<double>(horizon)));
    return initial + (final_value - initial) * progress;
  }
};

struct DqnConfig {
  double discount = 0.95;
  double learning_rate = 0.001;
  int batch_size = 64;
  std::size_t buffer_capacity = 2000;
  std::size_t warmup = 1000;      // replay starts once buffer >= warmup
  int target_sync_interval = 500; // gradient steps between hard syncs
  std::vector<int> hidden_layers{512, 256, 64};
  ExplorationSchedule schedule;
  DqnVariant variant = DqnVariant::Dqn;
  // When set, this value replaces the stored reward on terminal transitions
  // that end before the step cap; the reported curve keeps the real rewards.
  std::optional<double> terminal_failure_reward;
  // Budgets: whichever positive limit is hit first ends training. At least
  // one must be positive; the linear schedule requires a timestep budget.
  int episode_budget = 0;
  long long timestep_budget = 0;
  // When set, training stops once the moving average over the trailing
  // `early_stop_window` episodes reaches this value.
  std::optional<double> early_stop_moving_avg;
  int early_stop_window = 50;
};

void validate(const DqnConfig& config);

Eigen::VectorXd compute_targets_dqn(const std::vector<Transition>& batch,
                                    const Network& target_net, double gamma);

// Decoupled selection: the main net picks the bootstrap action, the target
// net scores it.
Eigen::VectorXd compute_targets_ddqn(const std::vector<Transition>& batch,
                                     const Network& main_net,
                                     const Network& target_net, double gamma);

void sync_target(const Network& main_net, Network& target_net);

int act(const Network& net, const Observation& obs, double epsilon, Rng& rng);

struct DqnResult {
  Network net;
  std::vector<double> episode_rewards;   // unshaped environment rewards
  std::vector<double> episode_epsilons;  // epsilon when the episode ended
  long long env_steps = 0;
  long long gradient_steps = 0;
};

// Runs the replay-buffer training loop. When step_log is non-null, one CSV
// row `episode,step,epsilon,loss,buffer_size` is written per environment
// step (loss empty on steps without a gradient step); the header is written
// first.
DqnResult train_dqn(Env& env, const DqnConfig& config, Rng& rng,
                    std::ostream* step_log = nullptr);

}  // namespace rl
