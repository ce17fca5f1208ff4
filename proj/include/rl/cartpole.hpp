#pragma once

#include "rl/env.hpp"

namespace rl {

// Inverted pendulum on a cart, discrete push-left / push-right actions,
// +1 reward per step. Classical constants; explicit Euler at 0.02 s.
struct CartPoleParams {
  double gravity = 9.8;        // m/s^2
  double cart_mass = 1.0;      // kg
  double pole_mass = 0.1;      // kg
  double half_length = 0.5;    // m, pole half-length
  double force_magnitude = 10.0;  // N
  double timestep = 0.02;      // s
  double theta_limit_deg = 15.0;  // termination angle (the classic library uses 12)
  double x_limit = 2.4;        // m
  int max_steps = 500;
};

// Component order (x, x_dot, theta, theta_dot) matches the observation vector.
struct CartPoleState {
  double x = 0.0;
  double x_dot = 0.0;
  double theta = 0.0;      // rad, 0 = upright
  double theta_dot = 0.0;  // rad/s
};

// One Euler step of the cart-pole dynamics; action 0 = push left, 1 = push
// right. Pure function, no termination logic.
CartPoleState cartpole_physics_step(const CartPoleState& s, int action,
                                    const CartPoleParams& p);

bool cartpole_failed(const CartPoleState& s, const CartPoleParams& p);

class CartPoleEnv : public Env {
 public:
  explicit CartPoleEnv(std::uint64_t seed, CartPoleParams params = {});

  const CartPoleState& state() const { return state_; }
  const CartPoleParams& params() const { return params_; }

 protected:
  Observation do_reset() override;
  StepResult do_step(int action) override;

 private:
  Observation observe() const;

  CartPoleParams params_;
  CartPoleState state_;
};

}  // namespace rl
