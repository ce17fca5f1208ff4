#include "rl/cartpole.hpp"

#include <cmath>
#include <numbers>

namespace rl {

CartPoleState cartpole_physics_step(const CartPoleState& s, int action,
                                    const CartPoleParams& p) {
  const double force = action == 1 ? p.force_magnitude : -p.force_magnitude;
  const double total_mass = p.cart_mass + p.pole_mass;
  const double cos_theta = std::cos(s.theta);
  const double sin_theta = std::sin(s.theta);

  const double temp =
      (force + p.pole_mass * p.half_length * s.theta_dot * s.theta_dot *
                   sin_theta) /
      total_mass;
  const double theta_acc =
      (p.gravity * sin_theta - cos_theta * temp) /
      (p.half_length *
       (4.0 / 3.0 - p.pole_mass * cos_theta * cos_theta / total_mass));
  const double x_acc =
      temp - p.pole_mass * p.half_length * theta_acc * cos_theta / total_mass;

  CartPoleState next = s;
  next.x += p.timestep * s.x_dot;
  next.x_dot += p.timestep * x_acc;
  next.theta += p.timestep * s.theta_dot;
  next.theta_dot += p.timestep * theta_acc;
  return next;
}

bool cartpole_failed(const CartPoleState& s, const CartPoleParams& p) {
  const double theta_limit = p.theta_limit_deg * std::numbers::pi / 180.0;
  return std::abs(s.x) > p.x_limit || std::abs(s.theta) > theta_limit;
}

CartPoleEnv::CartPoleEnv(std::uint64_t seed, CartPoleParams params)
    : Env(EnvDescriptor{ObsKind::Vector, 4, 0, 2, params.max_steps}, seed),
      params_(params) {}

Observation CartPoleEnv::observe() const {
  Eigen::VectorXd v(4);
  v << state_.x, state_.x_dot, state_.theta, state_.theta_dot;
  return Observation::vector(std::move(v));
}

Observation CartPoleEnv::do_reset() {
  state_.x = rng().uniform(-0.05, 0.05);
  state_.x_dot = rng().uniform(-0.05, 0.05);
  state_.theta = rng().uniform(-0.05, 0.05);
  state_.theta_dot = rng().uniform(-0.05, 0.05);
  return observe();
}

StepResult CartPoleEnv::do_step(int action) {
  state_ = cartpole_physics_step(state_, action, params_);
  return StepResult{observe(), 1.0, cartpole_failed(state_, params_)};
}

}  // namespace rl
