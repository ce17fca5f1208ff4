#include "rl/dqn.hpp"

#include <algorithm>
#include <stdexcept>

#include "rl/format.hpp"
#include "rl/tabular.hpp"

namespace rl {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : storage_(capacity) {
  if (capacity == 0) throw std::invalid_argument("capacity must be >= 1");
}

void ReplayBuffer::push(Transition t) {
  storage_[head_] = std::move(t);
  head_ = (head_ + 1) % storage_.size();
  if (size_ < storage_.size()) ++size_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= size_) throw std::invalid_argument("replay index out of range");
  const std::size_t oldest = (head_ + storage_.size() - size_) % storage_.size();
  return storage_[(oldest + i) % storage_.size()];
}

std::vector<Transition> sample_minibatch(const ReplayBuffer& buffer,
                                         int batch_size, Rng& rng) {
  if (batch_size < 1 ||
      static_cast<std::size_t>(batch_size) > buffer.size()) {
    throw std::invalid_argument("batch_size must lie in [1, buffer size]");
  }
  // Floyd's sampling: uniform inclusion without replacement.
  const std::size_t n = buffer.size();
  const std::size_t k = static_cast<std::size_t>(batch_size);
  std::vector<std::size_t> picks;
  picks.reserve(k);
  for (std::size_t j = n - k; j < n; ++j) {
    const std::size_t t = static_cast<std::size_t>(rng.uniform_int(j + 1));
    if (std::find(picks.begin(), picks.end(), t) == picks.end()) {
      picks.push_back(t);
    } else {
      picks.push_back(j);
    }
  }
  std::vector<Transition> batch;
  batch.reserve(k);
  for (std::size_t i : picks) batch.push_back(buffer.at(i));
  return batch;
}

void validate(const DqnConfig& c) {
  if (!(c.discount > 0.0 && c.discount <= 1.0)) {
    throw std::invalid_argument("discount must lie in (0,1]");
  }
  if (!(c.learning_rate > 0.0)) {
    throw std::invalid_argument("learning_rate must be > 0");
  }
  if (c.batch_size < 1 ||
      static_cast<std::size_t>(c.batch_size) > c.warmup ||
      c.warmup > c.buffer_capacity) {
    throw std::invalid_argument("need batch <= warmup <= capacity");
  }
  if (c.target_sync_interval < 1) {
    throw std::invalid_argument("target_sync_interval must be >= 1");
  }
  for (int h : c.hidden_layers) {
    if (h <= 0) throw std::invalid_argument("hidden sizes must be positive");
  }
  const ExplorationSchedule& s = c.schedule;
  if (!(s.initial >= 0.0 && s.initial <= 1.0 && s.final_value >= 0.0 &&
        s.final_value <= s.initial)) {
    throw std::invalid_argument("need 0 <= final epsilon <= initial <= 1");
  }
  if (!(s.decay > 0.0 && s.decay <= 1.0)) {
    throw std::invalid_argument("epsilon decay must lie in (0,1]");
  }
  if (!(s.fraction > 0.0 && s.fraction <= 1.0)) {
    throw std::invalid_argument("exploration fraction must lie in (0,1]");
  }
  if (c.episode_budget < 0 || c.timestep_budget < 0) {
    throw std::invalid_argument("budgets must be >= 0");
  }
  if (c.episode_budget == 0 && c.timestep_budget == 0) {
    throw std::invalid_argument("need an episode or timestep budget");
  }
  if (s.kind == ExplorationSchedule::Kind::LinearByTimestep &&
      c.timestep_budget == 0) {
    throw std::invalid_argument("linear schedule requires a timestep budget");
  }
  if (c.early_stop_window < 1) {
    throw std::invalid_argument("early_stop_window must be >= 1");
  }
}

namespace {

Eigen::MatrixXd next_state_matrix(const std::vector<Transition>& batch) {
  const Eigen::Index dim = batch.front().next_state.vec().size();
  Eigen::MatrixXd ns(batch.size(), dim);
  for (std::size_t j = 0; j < batch.size(); ++j) {
    ns.row(static_cast<Eigen::Index>(j)) = batch[j].next_state.vec();
  }
  return ns;
}

}  // namespace

Eigen::VectorXd compute_targets_dqn(const std::vector<Transition>& batch,
                                    const Network& target_net, double gamma) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const Eigen::MatrixXd q_next = forward(target_net, next_state_matrix(batch));
  Eigen::VectorXd y(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    y[row] = batch[j].reward;
    if (!batch[j].done) y[row] += gamma * q_next.row(row).maxCoeff();
  }
  return y;
}

Eigen::VectorXd compute_targets_ddqn(const std::vector<Transition>& batch,
                                     const Network& main_net,
                                     const Network& target_net, double gamma) {
  if (batch.empty()) throw std::invalid_argument("empty batch");
  const Eigen::MatrixXd ns = next_state_matrix(batch);
  const Eigen::MatrixXd q_main = forward(main_net, ns);
  const Eigen::MatrixXd q_target = forward(target_net, ns);
  Eigen::VectorXd y(batch.size());
  for (std::size_t j = 0; j < batch.size(); ++j) {
    const auto row = static_cast<Eigen::Index>(j);
    y[row] = batch[j].reward;
    if (!batch[j].done) {
      const int pick = greedy_action(q_main.row(row));
      y[row] += gamma * q_target(row, pick);
    }
  }
  return y;
}

void sync_target(const Network& main_net, Network& target_net) {
  target_net = main_net;
}

int act(const Network& net, const Observation& obs, double epsilon, Rng& rng) {
  const Eigen::MatrixXd q = forward(net, obs.vec().transpose());
  return epsilon_greedy(q.row(0), epsilon, rng);
}

DqnResult train_dqn(Env& env, const DqnConfig& config, Rng& rng,
                    std::ostream* step_log) {
  validate(config);
  const EnvDescriptor& desc = env.descriptor();
  if (desc.obs_kind != ObsKind::Vector) {
    throw std::logic_error("train_dqn requires a vector environment");
  }

  std::vector<int> sizes;
  sizes.push_back(desc.obs_dim);
  sizes.insert(sizes.end(), config.hidden_layers.begin(),
               config.hidden_layers.end());
  sizes.push_back(desc.action_count);

  DqnResult result;
  result.net = init_network(sizes, rng);
  Network target;
  sync_target(result.net, target);
  AdamState adam = make_adam(result.net, config.learning_rate);

  ReplayBuffer buffer(config.buffer_capacity);
  if (step_log != nullptr) {
    *step_log << "episode,step,epsilon,loss,buffer_size\n";
  }

  double epsilon = config.schedule.initial;
  const bool linear =
      config.schedule.kind == ExplorationSchedule::Kind::LinearByTimestep;
  Eigen::MatrixXd states(config.batch_size, desc.obs_dim);

  int episode = 0;
  bool out_of_steps = false;
  while (!out_of_steps &&
         (config.episode_budget == 0 || episode < config.episode_budget)) {
    ++episode;
    Observation obs = env.reset();
    double total = 0.0;
    bool done = false;
    while (!done) {
      if (linear) {
        epsilon = config.schedule.by_timestep(result.env_steps,
                                              config.timestep_budget);
      }
      const int action = act(result.net, obs, epsilon, rng);
      const StepResult step = env.step(action);
      total += step.reward;
      done = step.done;

      Transition t{obs, action, step.reward, step.observation, step.done};
      if (config.terminal_failure_reward.has_value() && step.done &&
          env.steps_taken() < desc.max_episode_steps) {
        t.reward = *config.terminal_failure_reward;
      }
      buffer.push(std::move(t));
      obs = step.observation;
      ++result.env_steps;

      std::optional<double> loss;
      if (buffer.size() >= config.warmup) {
        const std::vector<Transition> batch =
            sample_minibatch(buffer, config.batch_size, rng);
        const Eigen::VectorXd y =
            config.variant == DqnVariant::Dqn
                ? compute_targets_dqn(batch, target, config.discount)
                : compute_targets_ddqn(batch, result.net, target,
                                       config.discount);
        for (std::size_t j = 0; j < batch.size(); ++j) {
          states.row(static_cast<Eigen::Index>(j)) = batch[j].state.vec();
        }
        // Masked MSE: predictions are copied into the target matrix and only
        // the taken action's entry is overwritten, so gradients flow through
        // taken actions alone.
        Eigen::MatrixXd targets = forward(result.net, states);
        const Eigen::MatrixXd predictions = targets;
        for (std::size_t j = 0; j < batch.size(); ++j) {
          targets(static_cast<Eigen::Index>(j), batch[j].action) =
              y[static_cast<Eigen::Index>(j)];
        }
        loss = mse_loss(predictions, targets);
        const Gradients grads = backward(result.net, states, targets);
        adam_step(result.net, grads, adam);
        ++result.gradient_steps;
        epsilon = config.schedule.after_replay(epsilon);
        if (result.gradient_steps % config.target_sync_interval == 0) {
          sync_target(result.net, target);
        }
      }
      if (step_log != nullptr) {
        *step_log << episode << ',' << result.env_steps << ','
                  << format_double(epsilon) << ',';
        if (loss.has_value()) *step_log << format_double(*loss);
        *step_log << ',' << buffer.size() << '\n';
      }
      if (config.timestep_budget > 0 &&
          result.env_steps >= config.timestep_budget) {
        out_of_steps = true;
        break;
      }
    }
    if (done) {
      result.episode_rewards.push_back(total);
      result.episode_epsilons.push_back(epsilon);
      if (config.early_stop_moving_avg.has_value() &&
          static_cast<int>(result.episode_rewards.size()) >=
              config.early_stop_window) {
        double sum = 0.0;
        for (std::size_t i =
                 result.episode_rewards.size() -
                 static_cast<std::size_t>(config.early_stop_window);
             i < result.episode_rewards.size(); ++i) {
          sum += result.episode_rewards[i];
        }
        if (sum / config.early_stop_window >= *config.early_stop_moving_avg) {
          break;
        }
      }
    }
  }
  return result;
}

}  // namespace rl
