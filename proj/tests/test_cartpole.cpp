#include <doctest.h>

#include <cmath>
#include <numbers>

#include "rl/cartpole.hpp"
#include "rl/rng.hpp"

using rl::CartPoleParams;
using rl::CartPoleState;
using rl::cartpole_physics_step;

TEST_CASE("one push-right step from rest matches hand integration") {
  // From (0,0,0,0): temp = 10 / 1.1, theta_dd = -temp / (0.5*(4/3 - 0.1/1.1)),
  // x_dd = temp. Euler: x' = 0, x_dot' = 0.02*x_dd = 0.19512...,
  // theta' = 0, theta_dot' = 0.02*theta_dd = -0.29268...
  const CartPoleState s = cartpole_physics_step(CartPoleState{}, 1, {});
  CHECK(s.x == 0.0);
  CHECK(s.theta == 0.0);
  CHECK(s.x_dot == doctest::Approx(0.1951219512195122));
  CHECK(s.theta_dot == doctest::Approx(-0.2926829268292683));
}

TEST_CASE("push-left from rest mirrors push-right exactly") {
  const CartPoleState r = cartpole_physics_step(CartPoleState{}, 1, {});
  const CartPoleState l = cartpole_physics_step(CartPoleState{}, 0, {});
  CHECK(l.x == -r.x);
  CHECK(l.x_dot == -r.x_dot);
  CHECK(l.theta == -r.theta);
  CHECK(l.theta_dot == -r.theta_dot);
}

TEST_CASE("mirror symmetry on random states") {
  // Negating the state and swapping the action negates the next state.
  // The dynamics are odd under this reflection; equality holds to 1e-12.
  rl::Rng rng(2024);
  const CartPoleParams p;
  for (int i = 0; i < 10000; ++i) {
    CartPoleState s;
    s.x = rng.uniform(-2.4, 2.4);
    s.x_dot = rng.uniform(-3.0, 3.0);
    s.theta = rng.uniform(-0.26, 0.26);
    s.theta_dot = rng.uniform(-3.0, 3.0);
    const int a = static_cast<int>(rng.uniform_int(2));

    CartPoleState m;
    m.x = -s.x;
    m.x_dot = -s.x_dot;
    m.theta = -s.theta;
    m.theta_dot = -s.theta_dot;

    const CartPoleState n = cartpole_physics_step(s, a, p);
    const CartPoleState nm = cartpole_physics_step(m, 1 - a, p);
    CHECK(std::abs(nm.x + n.x) < 1e-12);
    CHECK(std::abs(nm.x_dot + n.x_dot) < 1e-12);
    CHECK(std::abs(nm.theta + n.theta) < 1e-12);
    CHECK(std::abs(nm.theta_dot + n.theta_dot) < 1e-12);
  }
}

TEST_CASE("euler update order: positions move with the old velocities") {
  CartPoleState s;
  s.x_dot = 1.0;
  s.theta_dot = -0.5;
  const CartPoleParams p;
  const CartPoleState n = cartpole_physics_step(s, 1, p);
  // Position updates use the pre-step velocity, not the updated one.
  CHECK(n.x == doctest::Approx(p.timestep * 1.0).epsilon(1e-12));
  CHECK(n.theta == doctest::Approx(p.timestep * -0.5).epsilon(1e-12));
}

TEST_CASE("failure bounds") {
  const CartPoleParams p;
  const double limit = p.theta_limit_deg * std::numbers::pi / 180.0;

  CartPoleState ok;
  CHECK(!rl::cartpole_failed(ok, p));

  CartPoleState tilted;
  tilted.theta = limit * 1.01;
  CHECK(rl::cartpole_failed(tilted, p));
  tilted.theta = -limit * 1.01;
  CHECK(rl::cartpole_failed(tilted, p));
  tilted.theta = limit * 0.99;
  CHECK(!rl::cartpole_failed(tilted, p));

  CartPoleState off_track;
  off_track.x = 2.5;
  CHECK(rl::cartpole_failed(off_track, p));
  off_track.x = -2.5;
  CHECK(rl::cartpole_failed(off_track, p));
  off_track.x = 2.3;
  CHECK(!rl::cartpole_failed(off_track, p));
}

TEST_CASE("reset draws each component uniformly in [-0.05, 0.05]") {
  rl::CartPoleEnv env(31);
  for (int i = 0; i < 200; ++i) {
    const Eigen::VectorXd v = env.reset().vec();
    REQUIRE(v.size() == 4);
    for (int k = 0; k < 4; ++k) {
      CHECK(v(k) >= -0.05);
      CHECK(v(k) <= 0.05);
    }
  }
}

TEST_CASE("every step rewards +1 and termination matches failure") {
  rl::CartPoleEnv env(7);
  env.reset();
  bool done = false;
  int steps = 0;
  rl::Rng rng(9);
  while (!done) {
    const auto r = env.step(static_cast<int>(rng.uniform_int(2)));
    CHECK(r.reward == 1.0);
    done = r.done;
    ++steps;
  }
  // A random policy balances for a moment only; failure must be the cause.
  CHECK(steps < 500);
  CHECK(rl::cartpole_failed(env.state(), env.params()));
}

TEST_CASE("an episode caps at 500 steps") {
  // Unreachable failure limits leave the step cap as the only terminator.
  CartPoleParams p;
  p.x_limit = 1e9;
  p.theta_limit_deg = 1e9;
  rl::CartPoleEnv env(3, p);
  env.reset();
  int steps = 0;
  while (true) {
    const auto r = env.step(1);
    ++steps;
    if (r.done) break;
  }
  CHECK(steps == 500);
}

TEST_CASE("observation mirrors the internal state") {
  rl::CartPoleEnv env(11);
  env.reset();
  const auto r = env.step(1);
  const auto& s = env.state();
  CHECK(r.observation.vec()(0) == s.x);
  CHECK(r.observation.vec()(1) == s.x_dot);
  CHECK(r.observation.vec()(2) == s.theta);
  CHECK(r.observation.vec()(3) == s.theta_dot);
}

TEST_CASE("env is deterministic under a fixed seed") {
  rl::CartPoleEnv a(42), b(42);
  const Eigen::VectorXd va = a.reset().vec();
  const Eigen::VectorXd vb = b.reset().vec();
  CHECK((va.array() == vb.array()).all());
  const auto ra = a.step(1);
  const auto rb = b.step(1);
  CHECK((ra.observation.vec().array() == rb.observation.vec().array()).all());
}
