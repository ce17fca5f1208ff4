#include <doctest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rl/cartpole.hpp"
#include "rl/dqn.hpp"
#include "rl/taxi.hpp"

using rl::DqnConfig;
using rl::Network;
using rl::ReplayBuffer;
using rl::Transition;

namespace {

Transition numbered(double id) {
  Transition t;
  t.state = rl::Observation::vector(Eigen::VectorXd::Constant(1, id));
  t.action = 0;
  t.reward = id;
  t.next_state = rl::Observation::vector(Eigen::VectorXd::Constant(1, id));
  t.done = false;
  return t;
}

// Net with zero weights and a fixed bias row: output is `bias` for any input.
Network constant_net(const std::vector<double>& bias, int input_dim = 1) {
  Network net;
  rl::DenseLayer l;
  l.weight = Eigen::MatrixXd::Zero(input_dim, static_cast<int>(bias.size()));
  l.bias.resize(static_cast<int>(bias.size()));
  for (std::size_t i = 0; i < bias.size(); ++i)
    l.bias(static_cast<int>(i)) = bias[i];
  net.layers.push_back(l);
  return net;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.push_back("");
  return out;
}

}  // namespace

TEST_CASE("replay buffer keeps the newest items in FIFO order") {
  ReplayBuffer buf(3);
  CHECK(buf.size() == 0);
  for (int i = 1; i <= 4; ++i) buf.push(numbered(i));
  REQUIRE(buf.size() == 3);
  CHECK(buf.at(0).reward == 2.0);
  CHECK(buf.at(1).reward == 3.0);
  CHECK(buf.at(2).reward == 4.0);

  for (int i = 5; i <= 7; ++i) buf.push(numbered(i));
  CHECK(buf.at(0).reward == 5.0);
  CHECK(buf.at(2).reward == 7.0);
}

TEST_CASE("replay buffer bounds") {
  CHECK_THROWS_AS(ReplayBuffer(0), std::invalid_argument);
  ReplayBuffer buf(4);
  buf.push(numbered(1));
  CHECK_NOTHROW(buf.at(0));
  CHECK_THROWS_AS(buf.at(1), std::invalid_argument);
}

TEST_CASE("minibatch sampling is without replacement") {
  ReplayBuffer buf(10);
  for (int i = 0; i < 10; ++i) buf.push(numbered(i));
  rl::Rng rng(3);
  const std::vector<Transition> batch = rl::sample_minibatch(buf, 10, rng);
  std::vector<bool> seen(10, false);
  for (const Transition& t : batch) {
    const int id = static_cast<int>(t.reward);
    CHECK(!seen[id]);
    seen[id] = true;
  }
}

TEST_CASE("minibatch sampling rejects bad sizes") {
  ReplayBuffer buf(10);
  for (int i = 0; i < 5; ++i) buf.push(numbered(i));
  rl::Rng rng(1);
  CHECK_THROWS_AS(rl::sample_minibatch(buf, 6, rng), std::invalid_argument);
  CHECK_THROWS_AS(rl::sample_minibatch(buf, 0, rng), std::invalid_argument);
  CHECK(rl::sample_minibatch(buf, 5, rng).size() == 5);
}

TEST_CASE("minibatch sampling is uniform within a 15% band") {
  ReplayBuffer buf(20);
  for (int i = 0; i < 20; ++i) buf.push(numbered(i));
  rl::Rng rng(77);
  std::vector<int> counts(20, 0);
  const int rounds = 20000;
  for (int r = 0; r < rounds; ++r) {
    for (const Transition& t : rl::sample_minibatch(buf, 5, rng))
      ++counts[static_cast<int>(t.reward)];
  }
  const double expected = rounds * 5.0 / 20.0;  // 5000 per slot
  for (int c : counts) {
    CHECK(c > expected * 0.85);
    CHECK(c < expected * 1.15);
  }
}

TEST_CASE("multiplicative schedule decays per replay and floors") {
  rl::ExplorationSchedule s;
  s.final_value = 0.5;
  s.decay = 0.9;
  CHECK(s.after_replay(1.0) == doctest::Approx(0.9));
  CHECK(s.after_replay(0.551) == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(s.after_replay(0.5) == 0.5);
}

TEST_CASE("linear schedule interpolates by timestep") {
  rl::ExplorationSchedule s;
  s.kind = rl::ExplorationSchedule::Kind::LinearByTimestep;
  s.initial = 1.0;
  s.final_value = 0.02;
  s.fraction = 0.1;
  const long long horizon = 20000;
  CHECK(s.by_timestep(0, horizon) == 1.0);
  CHECK(s.by_timestep(1000, horizon) == doctest::Approx(0.51));
  CHECK(s.by_timestep(2000, horizon) == doctest::Approx(0.02));
  CHECK(s.by_timestep(20000, horizon) == doctest::Approx(0.02));
  // The multiplicative hook is inert on the linear path.
  CHECK(s.after_replay(0.7) == 0.7);
}

TEST_CASE("config validation") {
  DqnConfig c;
  c.episode_budget = 10;
  CHECK_NOTHROW(rl::validate(c));

  DqnConfig bad = c;
  bad.discount = 0.0;
  CHECK_THROWS_AS(rl::validate(bad), std::invalid_argument);
  bad = c;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(rl::validate(bad), std::invalid_argument);
  bad = c;
  bad.batch_size = 2001;  // above warmup
  CHECK_THROWS_AS(rl::validate(bad), std::invalid_argument);
  bad = c;
  bad.warmup = bad.buffer_capacity + 1;
  CHECK_THROWS_AS(rl::validate(bad), std::invalid_argument);
  bad = c;
  bad.target_sync_interval = 0;
  CHECK_THROWS_AS(rl::validate(bad), std::invalid_argument);
  bad = c;
  bad.hidden_layers = {32, 0};
  CHECK_THROWS_AS(rl::validate(bad), std::invalid_argument);
  bad = c;
  bad.schedule.final_value = 2.0;
  CHECK_THROWS_AS(rl::validate(bad), std::invalid_argument);
  bad = c;
  bad.episode_budget = 0;  // no budget at all
  CHECK_THROWS_AS(rl::validate(bad), std::invalid_argument);
  bad = c;
  bad.schedule.kind = rl::ExplorationSchedule::Kind::LinearByTimestep;
  CHECK_THROWS_AS(rl::validate(bad), std::invalid_argument);  // needs timesteps
  bad.timestep_budget = 1000;
  CHECK_NOTHROW(rl::validate(bad));
  bad = c;
  bad.early_stop_window = 0;
  CHECK_THROWS_AS(rl::validate(bad), std::invalid_argument);
}

TEST_CASE("DQN targets bootstrap from the target net's max") {
  const Network target = constant_net({3.0, 2.0});
  std::vector<Transition> batch{numbered(0.0)};
  batch[0].reward = 1.0;
  const Eigen::VectorXd y = rl::compute_targets_dqn(batch, target, 0.95);
  CHECK(y[0] == doctest::Approx(1.0 + 0.95 * 3.0));
}

TEST_CASE("terminal transitions drop the bootstrap term") {
  const Network target = constant_net({3.0, 2.0});
  std::vector<Transition> batch{numbered(0.0)};
  batch[0].reward = -5.0;
  batch[0].done = true;
  CHECK(rl::compute_targets_dqn(batch, target, 0.95)[0] == -5.0);
  const Network main = constant_net({0.0, 5.0});
  CHECK(rl::compute_targets_ddqn(batch, main, target, 0.95)[0] == -5.0);
}

TEST_CASE("decoupled selection scores the main net's argmax on the target") {
  // Main prefers action 1; the target values it at 1 while valuing action 0
  // at 7. Plain DQN would bootstrap 7; the decoupled rule takes 1.
  const Network main = constant_net({0.0, 5.0});
  const Network target = constant_net({7.0, 1.0});
  std::vector<Transition> batch{numbered(0.0)};
  batch[0].reward = 1.0;
  const Eigen::VectorXd ddqn =
      rl::compute_targets_ddqn(batch, main, target, 0.5);
  CHECK(ddqn[0] == doctest::Approx(1.0 + 0.5 * 1.0));
  const Eigen::VectorXd dqn = rl::compute_targets_dqn(batch, target, 0.5);
  CHECK(dqn[0] == doctest::Approx(1.0 + 0.5 * 7.0));
}

TEST_CASE("equal main and target nets make both variants agree exactly") {
  rl::Rng rng(15);
  const Network net = rl::init_network({3, 8, 4}, rng);
  std::vector<Transition> batch;
  for (int i = 0; i < 16; ++i) {
    Transition t;
    Eigen::VectorXd s(3), ns(3);
    for (int k = 0; k < 3; ++k) {
      s[k] = rng.uniform(-1.0, 1.0);
      ns[k] = rng.uniform(-1.0, 1.0);
    }
    t.state = rl::Observation::vector(s);
    t.next_state = rl::Observation::vector(ns);
    t.action = static_cast<int>(rng.uniform_int(4));
    t.reward = rng.uniform(-2.0, 2.0);
    t.done = i % 5 == 0;
    batch.push_back(t);
  }
  const Eigen::VectorXd a = rl::compute_targets_dqn(batch, net, 0.97);
  const Eigen::VectorXd b = rl::compute_targets_ddqn(batch, net, net, 0.97);
  CHECK((a.array() == b.array()).all());
}

TEST_CASE("a zero discount reduces targets to rewards") {
  rl::Rng rng(2);
  const Network net = rl::init_network({1, 4, 2}, rng);
  std::vector<Transition> batch{numbered(3.5), numbered(-1.25)};
  // discount is validated elsewhere; the computation itself accepts 0 here.
  const Eigen::VectorXd y = rl::compute_targets_dqn(batch, net, 0.0);
  CHECK(y[0] == 3.5);
  CHECK(y[1] == -1.25);
}

TEST_CASE("empty batches are rejected") {
  const Network net = constant_net({0.0, 0.0});
  CHECK_THROWS_AS(rl::compute_targets_dqn({}, net, 0.9), std::invalid_argument);
  CHECK_THROWS_AS(rl::compute_targets_ddqn({}, net, net, 0.9),
                  std::invalid_argument);
}

TEST_CASE("sync copies the main net; the copy then goes stale") {
  rl::Rng rng(8);
  Network main = rl::init_network({2, 6, 3}, rng);
  Network target = rl::init_network({2, 6, 3}, rng);
  const Eigen::MatrixXd probe = Eigen::MatrixXd::Random(5, 2);

  rl::sync_target(main, target);
  CHECK((rl::forward(main, probe) - rl::forward(target, probe))
            .cwiseAbs()
            .maxCoeff() == 0.0);

  // Push the main net away; the target must not follow.
  rl::AdamState adam = rl::make_adam(main, 0.01);
  const Eigen::MatrixXd y = Eigen::MatrixXd::Random(5, 3);
  for (int i = 0; i < 5; ++i)
    rl::adam_step(main, rl::backward(main, probe, y), adam);
  CHECK((rl::forward(main, probe) - rl::forward(target, probe))
            .cwiseAbs()
            .maxCoeff() > 0.0);

  rl::sync_target(main, target);
  CHECK((rl::forward(main, probe) - rl::forward(target, probe))
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("act is greedy at epsilon 0 and explores at epsilon 1") {
  const Network net = constant_net({1.0, 5.0, 2.0});
  rl::Rng rng(4);
  const rl::Observation obs =
      rl::Observation::vector(Eigen::VectorXd::Constant(1, 0.3));
  for (int i = 0; i < 50; ++i) CHECK(rl::act(net, obs, 0.0, rng) == 1);
  std::vector<int> counts(3, 0);
  for (int i = 0; i < 3000; ++i) ++counts[rl::act(net, obs, 1.0, rng)];
  for (int c : counts) CHECK(c > 800);
}

TEST_CASE("train_dqn requires a vector environment") {
  rl::TaxiEnv env(0);
  rl::Rng rng(0);
  DqnConfig c;
  c.episode_budget = 1;
  CHECK_THROWS_AS(rl::train_dqn(env, c, rng), std::logic_error);
}

TEST_CASE("no gradient steps happen before the warm-up fills") {
  rl::CartPoleEnv env(5);
  rl::Rng rng(77);
  DqnConfig c;
  c.hidden_layers = {6};
  c.warmup = 1000;
  c.buffer_capacity = 1000;
  c.batch_size = 8;
  c.timestep_budget = 60;  // far below the warm-up
  const rl::DqnResult r = rl::train_dqn(env, c, rng);
  CHECK(r.gradient_steps == 0);
  CHECK(r.env_steps == 60);

  // The net is exactly the freshly initialized one: training never touched it.
  rl::Rng fresh(77);
  const Network init = rl::init_network({4, 6, 2}, fresh);
  for (std::size_t i = 0; i < init.layers.size(); ++i) {
    CHECK((r.net.layers[i].weight.array() == init.layers[i].weight.array())
              .all());
    CHECK((r.net.layers[i].bias.array() == init.layers[i].bias.array()).all());
  }
}

TEST_CASE("step log rows: empty loss before warm-up, filled after") {
  rl::CartPoleEnv env(9);
  rl::Rng rng(31);
  DqnConfig c;
  c.hidden_layers = {6};
  c.warmup = 20;
  c.buffer_capacity = 100;
  c.batch_size = 4;
  c.timestep_budget = 40;
  std::ostringstream log;
  const rl::DqnResult r = rl::train_dqn(env, c, rng, &log);

  std::istringstream in(log.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "episode,step,epsilon,loss,buffer_size");
  int rows = 0;
  while (std::getline(in, line)) {
    const std::vector<std::string> cells = split(line, ',');
    REQUIRE(cells.size() == 5);
    ++rows;
    const int step = std::stoi(cells[1]);
    CHECK(step == rows);
    if (step < 20) {
      CHECK(cells[3].empty());
      CHECK(std::stoi(cells[4]) == step);  // buffer grows one per step
    } else {
      CHECK(!cells[3].empty());
      CHECK(std::stod(cells[3]) >= 0.0);
    }
  }
  CHECK(rows == 40);
  CHECK(r.gradient_steps == 21);  // steps 20..40 replay
}

TEST_CASE("terminal failure shaping feeds the buffer, not the curve") {
  // One-slot buffer with batch 1: every gradient step trains on the newest
  // transition alone, so the logged loss at a terminal step reveals the
  // stored reward. With -100 shaping the squared error is huge; the curve
  // still records the true +1-per-step returns.
  rl::CartPoleEnv env(3);
  rl::Rng rng(11);
  DqnConfig c;
  c.hidden_layers = {6};
  c.warmup = 1;
  c.buffer_capacity = 1;
  c.batch_size = 1;
  c.episode_budget = 3;
  c.terminal_failure_reward = -100.0;
  std::ostringstream log;
  const rl::DqnResult r = rl::train_dqn(env, c, rng, &log);

  REQUIRE(r.episode_rewards.size() == 3);

  std::istringstream in(log.str());
  std::string line;
  std::getline(in, line);  // header
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) rows.push_back(split(line, ','));

  // Episode lengths from the log give the curve check: +1 per step.
  std::vector<int> lengths;
  int count = 0;
  int current = 1;
  for (const auto& cells : rows) {
    const int ep = std::stoi(cells[0]);
    if (ep != current) {
      lengths.push_back(count);
      count = 0;
      current = ep;
    }
    ++count;
  }
  lengths.push_back(count);
  REQUIRE(lengths.size() == 3);
  for (int e = 0; e < 3; ++e)
    CHECK(r.episode_rewards[e] == doctest::Approx(lengths[e]));

  // The last row of each episode trained on the shaped -100 target.
  std::size_t idx = 0;
  for (int e = 0; e < 3; ++e) {
    idx += static_cast<std::size_t>(lengths[e]);
    const double loss = std::stod(rows[idx - 1][3]);
    CHECK(loss > 1000.0);
  }
}

TEST_CASE("early stop ends training when the trailing mean clears the bar") {
  rl::CartPoleEnv env(2);
  rl::Rng rng(6);
  DqnConfig c;
  c.hidden_layers = {6};
  c.warmup = 32;
  c.buffer_capacity = 200;
  c.batch_size = 8;
  c.episode_budget = 1000;
  c.early_stop_moving_avg = 1.0;  // any episode lasts at least one step
  c.early_stop_window = 3;
  const rl::DqnResult r = rl::train_dqn(env, c, rng);
  CHECK(r.episode_rewards.size() == 3);
}

TEST_CASE("the timestep budget cuts an episode mid-flight") {
  rl::CartPoleEnv env(5);
  rl::Rng rng(1);
  DqnConfig c;
  c.hidden_layers = {6};
  c.warmup = 1000;
  c.buffer_capacity = 1000;
  c.batch_size = 8;
  c.timestep_budget = 5;  // shorter than any balancing episode
  const rl::DqnResult r = rl::train_dqn(env, c, rng);
  CHECK(r.env_steps == 5);
  // The unfinished episode is not reported on the curve.
  CHECK(r.episode_rewards.empty());
}

TEST_CASE("linear exploration is driven by environment steps") {
  rl::CartPoleEnv env(8);
  rl::Rng rng(21);
  DqnConfig c;
  c.hidden_layers = {6};
  c.warmup = 16;
  c.buffer_capacity = 100;
  c.batch_size = 4;
  c.schedule.kind = rl::ExplorationSchedule::Kind::LinearByTimestep;
  c.schedule.initial = 1.0;
  c.schedule.final_value = 0.1;
  c.schedule.fraction = 0.5;
  c.timestep_budget = 100;
  std::ostringstream log;
  rl::train_dqn(env, c, rng, &log);

  std::istringstream in(log.str());
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) rows.push_back(split(line, ','));
  REQUIRE(rows.size() == 100);
  CHECK(std::stod(rows[0][2]) == doctest::Approx(1.0));
  // Halfway through the decay window (step 25 of 50): epsilon = 0.55.
  CHECK(std::stod(rows[24][2]) == doctest::Approx(1.0 + (0.1 - 1.0) * 24.0 / 50.0));
  CHECK(std::stod(rows[99][2]) == doctest::Approx(0.1));
}

TEST_CASE("training runs are bitwise reproducible") {
  DqnConfig c;
  c.hidden_layers = {8};
  c.warmup = 32;
  c.buffer_capacity = 200;
  c.batch_size = 8;
  c.episode_budget = 5;

  rl::CartPoleEnv e1(4), e2(4);
  rl::Rng r1(9), r2(9);
  const rl::DqnResult a = rl::train_dqn(e1, c, r1);
  const rl::DqnResult b = rl::train_dqn(e2, c, r2);
  CHECK(a.env_steps == b.env_steps);
  CHECK(a.episode_rewards == b.episode_rewards);
  for (std::size_t i = 0; i < a.net.layers.size(); ++i) {
    CHECK((a.net.layers[i].weight.array() == b.net.layers[i].weight.array())
              .all());
  }
}

TEST_CASE("the DDQN variant trains end to end") {
  rl::CartPoleEnv env(12);
  rl::Rng rng(13);
  DqnConfig c;
  c.hidden_layers = {8};
  c.warmup = 32;
  c.buffer_capacity = 200;
  c.batch_size = 8;
  c.episode_budget = 6;
  c.variant = rl::DqnVariant::Ddqn;
  const rl::DqnResult r = rl::train_dqn(env, c, rng);
  CHECK(r.episode_rewards.size() == 6);
  CHECK(r.gradient_steps > 0);
}
