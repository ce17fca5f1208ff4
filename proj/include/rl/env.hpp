#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "rl/rng.hpp"

namespace rl {

enum class ObsKind { Discrete, Vector };

// An observation is either a discrete state id or a flat real vector.
class Observation {
 public:
  Observation() = default;

  static Observation discrete(int id) {
    Observation o;
    o.kind_ = ObsKind::Discrete;
    o.id_ = id;
    return o;
  }

  static Observation vector(Eigen::VectorXd v) {
    Observation o;
    o.kind_ = ObsKind::Vector;
    o.vec_ = std::move(v);
    return o;
  }

  ObsKind kind() const { return kind_; }
  bool is_discrete() const { return kind_ == ObsKind::Discrete; }

  int id() const;                    // discrete only
  const Eigen::VectorXd& vec() const;  // vector only

 private:
  ObsKind kind_ = ObsKind::Discrete;
  int id_ = 0;
  Eigen::VectorXd vec_;
};

// One (s, a, r, s', done) experience tuple. When done is set, next_state still
// holds the observed terminal observation.
struct Transition {
  Observation state;
  int action = 0;
  double reward = 0.0;
  Observation next_state;
  bool done = false;
};

struct EnvDescriptor {
  ObsKind obs_kind = ObsKind::Discrete;
  int obs_dim = 0;      // vector observations: declared dimension
  int state_count = 0;  // discrete observations: number of state ids
  int action_count = 0;
  int max_episode_steps = 0;
};

struct StepResult {
  Observation observation;
  double reward = 0.0;
  bool done = false;
};

struct EpisodeTrace {
  std::vector<Transition> transitions;
  double total_reward = 0.0;
  int length = 0;

  // Sum of gamma^k * r_k, accumulated backwards (Horner) so that returns on a
  // deterministic MDP compare exactly against value-iteration fixed points.
  double discounted_return(double gamma) const {
    double g = 0.0;
    for (auto it = transitions.rbegin(); it != transitions.rend(); ++it)
      g = it->reward + gamma * g;
    return g;
  }
};

// Environment contract. Single-threaded state machine: reset() starts an
// episode (optionally reseeding the internal stream), step() advances one
// decision step and enforces the action-range / not-terminated preconditions.
// The base class owns the step counter and applies the max_episode_steps cap.
class Env {
 public:
  virtual ~Env() = default;

  const EnvDescriptor& descriptor() const { return desc_; }

  Observation reset(std::optional<std::uint64_t> seed = std::nullopt);
  StepResult step(int action);

  int steps_taken() const { return steps_; }

 protected:
  Env(EnvDescriptor desc, std::uint64_t seed);

  virtual Observation do_reset() = 0;
  virtual StepResult do_step(int action) = 0;

  Rng& rng() { return rng_; }

 private:
  EnvDescriptor desc_;
  Rng rng_;
  int steps_ = 0;
  bool awaiting_reset_ = true;
  bool terminated_ = false;
};

// Policies consume an observation plus a random stream (greedy policies
// simply ignore the stream).
using Policy = std::function<int(const Observation&, Rng&)>;

// Resets the environment and rolls one episode, stopping at the terminal
// step or after max_steps transitions, whichever comes first.
EpisodeTrace run_episode(Env& env, const Policy& policy, int max_steps,
                         Rng& rng);

}  // namespace rl
