#include "rl/env.hpp"

#include <stdexcept>
#include <string>

namespace rl {

int Observation::id() const {
  if (kind_ != ObsKind::Discrete)
    throw std::logic_error("Observation: id() called on a vector observation");
  return id_;
}

const Eigen::VectorXd& Observation::vec() const {
  if (kind_ != ObsKind::Vector)
    throw std::logic_error("Observation: vec() called on a discrete observation");
  return vec_;
}

Env::Env(EnvDescriptor desc, std::uint64_t seed) : desc_(desc), rng_(seed) {
  if (desc_.action_count < 2)
    throw std::invalid_argument("EnvDescriptor: action_count must be >= 2");
  if (desc_.max_episode_steps < 1)
    throw std::invalid_argument("EnvDescriptor: max_episode_steps must be >= 1");
}

Observation Env::reset(std::optional<std::uint64_t> seed) {
  if (seed) rng_ = Rng(*seed);
  steps_ = 0;
  awaiting_reset_ = false;
  terminated_ = false;
  return do_reset();
}

StepResult Env::step(int action) {
  if (awaiting_reset_)
    throw std::logic_error("Env: step() called before reset()");
  if (terminated_)
    throw std::logic_error("Env: step() called on a terminated episode");
  if (action < 0 || action >= desc_.action_count)
    throw std::invalid_argument("Env: action " + std::to_string(action) +
                                " outside [0, " +
                                std::to_string(desc_.action_count) + ")");
  StepResult result = do_step(action);
  ++steps_;
  if (steps_ >= desc_.max_episode_steps) result.done = true;
  terminated_ = result.done;
  return result;
}

EpisodeTrace run_episode(Env& env, const Policy& policy, int max_steps,
                         Rng& rng) {
  if (max_steps < 1)
    throw std::invalid_argument("run_episode: max_steps must be >= 1");
  EpisodeTrace trace;
  Observation obs = env.reset();
  for (int t = 0; t < max_steps; ++t) {
    const int action = policy(obs, rng);
    StepResult r = env.step(action);
    trace.transitions.push_back(
        Transition{obs, action, r.reward, r.observation, r.done});
    trace.total_reward += r.reward;
    ++trace.length;
    obs = r.observation;
    if (r.done) break;
  }
  return trace;
}

}  // namespace rl
