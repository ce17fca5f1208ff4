#include "rl/tabular.hpp"

#include <cmath>
#include <stdexcept>

namespace rl {

void validate(const TabularParams& p) {
  if (!(p.learning_rate > 0.0 && p.learning_rate <= 1.0)) {
    throw std::invalid_argument("learning_rate must lie in (0,1]");
  }
  if (!(p.discount > 0.0 && p.discount <= 1.0)) {
    throw std::invalid_argument("discount must lie in (0,1]");
  }
  if (!(p.epsilon_floor >= 0.0 && p.epsilon_floor <= p.epsilon_initial &&
        p.epsilon_initial <= 1.0)) {
    throw std::invalid_argument("need 0 <= floor <= initial <= 1");
  }
  if (!(p.epsilon_decay > 0.0 && p.epsilon_decay <= 1.0)) {
    throw std::invalid_argument("epsilon_decay must lie in (0,1]");
  }
  if (p.decay_warmup_episodes < 0 || p.episodes < 0) {
    throw std::invalid_argument("episode counts must be >= 0");
  }
}

double q_update(QTable& q, int state, int action, double reward,
                int next_state, bool done, double alpha, double gamma) {
  if (state < 0 || state >= q.rows() || action < 0 || action >= q.cols() ||
      next_state < 0 || next_state >= q.rows()) {
    throw std::invalid_argument("q_update: index out of range");
  }
  if (!std::isfinite(reward)) {
    throw std::invalid_argument("q_update: non-finite reward");
  }
  const double bootstrap = done ? 0.0 : q.row(next_state).maxCoeff();
  const double target = reward + gamma * bootstrap;
  q(state, action) += alpha * (target - q(state, action));
  return q(state, action);
}

TabularResult train_tabular(Env& env, const TabularParams& params, Rng& rng) {
  validate(params);
  const EnvDescriptor& desc = env.descriptor();
  if (desc.obs_kind != ObsKind::Discrete) {
    throw std::logic_error("train_tabular requires a discrete environment");
  }

  TabularResult result;
  result.q = QTable::Zero(desc.state_count, desc.action_count);
  result.episode_rewards.reserve(static_cast<std::size_t>(params.episodes));
  result.episode_epsilons.reserve(static_cast<std::size_t>(params.episodes));
  result.table_diffs.reserve(static_cast<std::size_t>(params.episodes));

  double epsilon = params.epsilon_initial;
  QTable previous = result.q;
  for (int episode = 1; episode <= params.episodes; ++episode) {
    int state = env.reset().id();
    double total = 0.0;
    bool done = false;
    while (!done) {
      const int action = epsilon_greedy(result.q.row(state), epsilon, rng);
      const StepResult step = env.step(action);
      const int next_state = step.observation.id();
      q_update(result.q, state, action, step.reward, next_state, step.done,
               params.learning_rate, params.discount);
      total += step.reward;
      state = next_state;
      done = step.done;
    }
    result.episode_rewards.push_back(total);
    result.episode_epsilons.push_back(epsilon);
    result.table_diffs.push_back((result.q - previous).cwiseAbs().maxCoeff());
    previous = result.q;
    if (episode > params.decay_warmup_episodes) {
      epsilon = decay_epsilon(epsilon, params.epsilon_decay,
                              params.epsilon_floor);
    }
  }
  return result;
}

EvalStats evaluate(Env& env, const Policy& policy, int episodes, Rng& rng) {
  if (episodes < 1) throw std::invalid_argument("episodes must be >= 1");
  long long penalties = 0;
  long long steps = 0;
  double total_reward = 0.0;
  const int cap = env.descriptor().max_episode_steps;
  for (int e = 0; e < episodes; ++e) {
    const EpisodeTrace trace = run_episode(env, policy, cap, rng);
    for (const Transition& t : trace.transitions) {
      if (t.reward == -10.0) ++penalties;
    }
    steps += trace.length;
    total_reward += trace.total_reward;
  }
  EvalStats stats;
  stats.penalties_per_episode = static_cast<double>(penalties) / episodes;
  stats.timesteps_per_trip = static_cast<double>(steps) / episodes;
  stats.reward_per_move = total_reward / static_cast<double>(steps);
  stats.mean_return = total_reward / episodes;
  return stats;
}

Policy random_policy(const EnvDescriptor& desc) {
  const auto actions = static_cast<std::uint64_t>(desc.action_count);
  return [actions](const Observation&, Rng& rng) {
    return static_cast<int>(rng.uniform_int(actions));
  };
}

Policy greedy_policy(QTable q) {
  return [q = std::move(q)](const Observation& obs, Rng&) {
    return greedy_action(q.row(obs.id()));
  };
}

QTable value_iteration_oracle(const TransitionModel& model, int state_count,
                              int action_count, double gamma, double tol,
                              std::vector<double>* sweep_diffs) {
  if (!(tol > 0.0)) throw std::invalid_argument("tol must be > 0");
  QTable q = QTable::Zero(state_count, action_count);
  QTable next(state_count, action_count);
  while (true) {
    for (int s = 0; s < state_count; ++s) {
      for (int a = 0; a < action_count; ++a) {
        const ModelStep t = model(s, a);
        const double bootstrap = t.done ? 0.0 : q.row(t.next_state).maxCoeff();
        next(s, a) = t.reward + gamma * bootstrap;
      }
    }
    const double diff = (next - q).cwiseAbs().maxCoeff();
    if (sweep_diffs != nullptr) sweep_diffs->push_back(diff);
    q.swap(next);
    if (diff < tol) break;
  }
  return q;
}

}  // namespace rl
