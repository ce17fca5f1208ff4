#include "rl/highway.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "rl/format.hpp"

namespace rl {

namespace {

// A vehicle blocks both its current lane and, while changing, its target.
bool occupies(const Vehicle& v, int lane) {
  return v.lane == lane || v.target_lane == lane;
}

bool lanes_shared(const Vehicle& a, const Vehicle& b) {
  return occupies(a, b.lane) || occupies(a, b.target_lane);
}

// Gap below which a follower at vf can no longer stop short of a leader
// holding vl: car length, relative stopping distance at kHighwayAccel, two
// steps of closing for the decision lag, and one step of own travel, which
// absorbs the cumulative one-step lag of speed matching while a leader
// brakes all the way down.
double safe_gap(double vf, double vl, double dt) {
  const double closing = std::max(0.0, vf - vl);
  return kVehicleLength +
         std::max(0.0, vf * vf - vl * vl) / (2.0 * kHighwayAccel) +
         2.0 * closing * dt + vf * dt;
}

// Nearest vehicle ahead of `w` across the lanes it occupies, ego included;
// nullptr if none.
const Vehicle* leader_of(const HighwayWorld& world, const Vehicle& w) {
  const Vehicle* best = nullptr;
  for (const Vehicle& o : world.others) {
    if (&o == &w || !lanes_shared(o, w) || o.s <= w.s) continue;
    if (best == nullptr || o.s < best->s) best = &o;
  }
  if (&world.ego != &w && lanes_shared(world.ego, w) && world.ego.s > w.s) {
    if (best == nullptr || world.ego.s < best->s) best = &world.ego;
  }
  return best;
}

void advance_lane_change(Vehicle& w) {
  if (w.target_lane == w.lane) return;
  w.lateral_offset += 0.25;
  if (w.lateral_offset >= 1.0 - 1e-12) {
    w.lane = w.target_lane;
    w.lateral_offset = 0.0;
  }
}

}  // namespace

void validate(const HighwayConfig& c) {
  if (c.lanes_count < 2) throw std::invalid_argument("lanes_count must be >= 2");
  if (c.vehicles_count < 0) {
    throw std::invalid_argument("vehicles_count must be >= 0");
  }
  if (!(c.vehicles_density > 0.0)) {
    throw std::invalid_argument("vehicles_density must be > 0");
  }
  if (c.duration < 1) throw std::invalid_argument("duration must be >= 1");
  if (!(c.v_min < c.v_max)) throw std::invalid_argument("need v_min < v_max");
  if (c.speed_coeff < 0.0 || c.collision_coeff < 0.0 ||
      c.right_lane_coeff < 0.0) {
    throw std::invalid_argument("reward coefficients must be >= 0");
  }
  if (!(c.timestep > 0.0)) throw std::invalid_argument("timestep must be > 0");
}

double highway_reward(double v, bool collided, int lane,
                      const HighwayConfig& config) {
  const double frac =
      std::clamp((v - config.v_min) / (config.v_max - config.v_min), 0.0, 1.0);
  return config.speed_coeff * frac -
         config.collision_coeff * (collided ? 1.0 : 0.0) +
         config.right_lane_coeff * lane / (config.lanes_count - 1);
}

HighwayWorld highway_spawn(const HighwayConfig& config, Rng& rng) {
  HighwayWorld world;
  world.ego.lane = world.ego.target_lane =
      static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(config.lanes_count)));
  world.ego.s = 0.0;
  world.ego.v = 0.5 * (config.v_min + config.v_max);
  world.ego_target_speed = world.ego.v;

  const double mean_gap = 25.0 / config.vehicles_density;
  // Same-lane berth at spawn: length plus one step of travel at the speed
  // ceiling. Braking keeps a one-step standing margin; birth must grant it.
  const double berth = kVehicleLength + config.v_max * config.timestep;
  double cursor = 0.0;
  world.others.reserve(static_cast<std::size_t>(config.vehicles_count));
  for (int i = 0; i < config.vehicles_count; ++i) {
    double s = cursor;
    int lane = 0;
    for (int attempt = 0; attempt < 100; ++attempt) {
      const double gap = rng.exponential(mean_gap);
      lane = static_cast<int>(
          rng.uniform_int(static_cast<std::uint64_t>(config.lanes_count)));
      s = cursor + gap;
      bool overlap = lane == world.ego.lane &&
                     std::abs(s - world.ego.s) < kVehicleLength;
      for (const Vehicle& o : world.others) {
        overlap = overlap || (o.lane == lane && std::abs(o.s - s) < berth);
      }
      if (!overlap) break;
    }
    cursor = s;
    const double v = rng.uniform(0.7 * config.v_min, config.v_max);
    world.others.push_back(Vehicle{lane, lane, 0.0, s, v});
  }

  // Cap speeds so every follower can shed its excess inside the gap to its
  // leader even if the whole chain ahead settles at its slowest member's
  // speed; front to back, so each cap sees final speeds. Placement is in
  // increasing s, so the first same-lane successor leads.
  for (std::size_t i = world.others.size(); i-- > 0;) {
    Vehicle& w = world.others[i];
    const Vehicle* lead = nullptr;
    double chain_min = 0.0;
    for (std::size_t j = i + 1; j < world.others.size(); ++j) {
      const Vehicle& o = world.others[j];
      if (o.lane != w.lane) continue;
      if (lead == nullptr) lead = &o;
      chain_min = lead == &o ? o.v : std::min(chain_min, o.v);
    }
    if (lead != nullptr) {
      const double slack = lead->s - w.s - berth;
      const double feasible =
          chain_min +
          std::sqrt(2.0 * kHighwayAccel * std::max(0.0, slack));
      w.v = std::min(w.v, feasible);
    }
  }
  return world;
}

bool highway_collided(const HighwayWorld& world) {
  for (const Vehicle& w : world.others) {
    if (std::abs(w.s - world.ego.s) < kVehicleLength &&
        std::abs(w.y() - world.ego.y()) < kVehicleWidth) {
      return true;
    }
  }
  return false;
}

HighwayOutcome highway_world_step(HighwayWorld& world, int action,
                                  const HighwayConfig& config, Rng& rng) {
  Vehicle& ego = world.ego;
  const double dt = config.timestep;

  if (action == 0 && ego.lateral_offset == 0.0 && ego.lane > 0) {
    ego.target_lane = ego.lane - 1;
  } else if (action == 2 && ego.lateral_offset == 0.0 &&
             ego.lane < config.lanes_count - 1) {
    ego.target_lane = ego.lane + 1;
  } else if (action == 3) {
    world.ego_target_speed = std::min(world.ego_target_speed + 5.0, config.v_max);
  } else if (action == 4) {
    world.ego_target_speed =
        std::max(world.ego_target_speed - 5.0, config.v_min - 5.0);
  }

  // A slot is free when every occupant of the target lane sits outside both
  // the 2-length courtesy zone and the braking envelope in either role.
  const auto lane_free = [&](const Vehicle& w, int target) {
    const auto clear = [&](const Vehicle& o) {
      if (!occupies(o, target)) return true;
      const double gap = std::abs(o.s - w.s);
      if (gap < 2.0 * kVehicleLength) return false;
      return o.s > w.s ? gap >= safe_gap(w.v, o.v, config.timestep)
                       : gap >= safe_gap(o.v, w.v, config.timestep);
    };
    if (!clear(world.ego)) return false;
    for (const Vehicle& o : world.others) {
      if (&o != &w && !clear(o)) return false;
    }
    return true;
  };

  // 0 = hold speed, 1 = headway braking (floored at the leader's speed),
  // 2 = envelope braking (down to a standstill if needed).
  std::vector<char> brake(world.others.size(), 0);
  std::vector<double> lead_speed(world.others.size(), 0.0);
  for (std::size_t i = 0; i < world.others.size(); ++i) {
    Vehicle& w = world.others[i];
    if (w.lateral_offset == 0.0 && rng.uniform() < 0.01) {
      int candidates[2];
      int n = 0;
      if (w.lane > 0) candidates[n++] = w.lane - 1;
      if (w.lane < config.lanes_count - 1) candidates[n++] = w.lane + 1;
      if (n > 0) {
        const int target = candidates[rng.uniform_int(
            static_cast<std::uint64_t>(n))];
        if (lane_free(w, target)) w.target_lane = target;
      }
    }
    const Vehicle* lead = leader_of(world, w);
    if (lead != nullptr) {
      const double gap = lead->s - w.s;
      if (gap < safe_gap(w.v, lead->v, config.timestep)) {
        brake[i] = 2;
      } else if (gap < 2.0 * w.v) {
        brake[i] = 1;
      }
      lead_speed[i] = lead->v;
    }
  }

  const double dv = std::clamp(world.ego_target_speed - ego.v,
                               -kHighwayAccel * dt, kHighwayAccel * dt);
  ego.v = std::max(0.0, ego.v + dv);
  ego.s += ego.v * dt;
  advance_lane_change(ego);
  for (std::size_t i = 0; i < world.others.size(); ++i) {
    Vehicle& w = world.others[i];
    if (brake[i] != 0) {
      // Headway braking matches the leader; envelope braking dips one step
      // below it so the gap reopens without compounding down a chain.
      const double floor =
          brake[i] == 2 ? std::max(0.0, lead_speed[i] - kHighwayAccel * dt)
                        : lead_speed[i];
      w.v = std::max(std::min(w.v, floor), w.v - kHighwayAccel * dt);
    }
    w.s += w.v * dt;
    advance_lane_change(w);
  }

  for (Vehicle& w : world.others) {
    if (w.s < ego.s - 250.0) {
      const double gap = rng.exponential(25.0 / config.vehicles_density);
      const int lane = static_cast<int>(
          rng.uniform_int(static_cast<std::uint64_t>(config.lanes_count)));
      const double v = rng.uniform(0.7 * config.v_min, config.v_max);
      double base = ego.s + 100.0;
      for (const Vehicle& o : world.others) base = std::max(base, o.s);
      // The lane's previous frontmost becomes the follower; land outside
      // its braking envelope.
      for (const Vehicle& o : world.others) {
        if (&o == &w || !occupies(o, lane)) continue;
        base = std::max(base, o.s + safe_gap(o.v, v, config.timestep));
      }
      w.s = base + gap;
      w.lane = w.target_lane = lane;
      w.lateral_offset = 0.0;
      w.v = v;
    }
  }

  HighwayOutcome out;
  out.collided = highway_collided(world);
  out.reward = highway_reward(ego.v, out.collided, ego.lane, config);
  return out;
}

Eigen::VectorXd highway_observe(const HighwayWorld& world,
                                const HighwayConfig& config) {
  const Vehicle& ego = world.ego;
  const double road = (config.lanes_count - 1) * kLaneWidth;
  Eigen::VectorXd obs = Eigen::VectorXd::Zero(25);

  obs[0] = 1.0;
  obs[1] = std::clamp(ego.s / 100.0, -1.0, 1.0);
  obs[2] = ego.y() / road;
  obs[3] = ego.v / 40.0;
  obs[4] = ego.lateral_speed() / 40.0;

  std::vector<std::size_t> order(world.others.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) {
                     return std::abs(world.others[a].s - ego.s) <
                            std::abs(world.others[b].s - ego.s);
                   });
  const std::size_t shown = std::min<std::size_t>(4, order.size());
  for (std::size_t i = 0; i < shown; ++i) {
    const Vehicle& w = world.others[order[i]];
    const Eigen::Index base = static_cast<Eigen::Index>(5 * (i + 1));
    obs[base + 0] = 1.0;
    obs[base + 1] = std::clamp((w.s - ego.s) / 100.0, -1.0, 1.0);
    obs[base + 2] = std::clamp((w.y() - ego.y()) / road, -1.0, 1.0);
    obs[base + 3] = std::clamp((w.v - ego.v) / 40.0, -1.0, 1.0);
    obs[base + 4] = w.lateral_speed() / 40.0;
  }
  return obs.cwiseMax(-1.0).cwiseMin(1.0);
}

HighwayEnv::HighwayEnv(std::uint64_t seed, HighwayConfig config)
    : Env(EnvDescriptor{ObsKind::Vector, 25, 0, 5, config.duration}, seed),
      config_(config) {
  validate(config_);
}

void HighwayEnv::set_trajectory_sink(std::ostream* sink) {
  trajectory_sink_ = sink;
  if (trajectory_sink_ != nullptr) {
    *trajectory_sink_ << "step,ego_lane,ego_s,ego_v,reward,collided\n";
  }
}

Observation HighwayEnv::do_reset() {
  world_ = highway_spawn(config_, rng());
  trajectory_step_ = 0;
  return Observation::vector(highway_observe(world_, config_));
}

StepResult HighwayEnv::do_step(int action) {
  const HighwayOutcome out = highway_world_step(world_, action, config_, rng());
  ++trajectory_step_;
  if (trajectory_sink_ != nullptr) {
    *trajectory_sink_ << trajectory_step_ << ',' << world_.ego.lane << ','
                      << format_double(world_.ego.s) << ','
                      << format_double(world_.ego.v) << ','
                      << format_double(out.reward) << ','
                      << (out.collided ? 1 : 0) << '\n';
  }
  return StepResult{Observation::vector(highway_observe(world_, config_)),
                    out.reward, out.collided};
}

}  // namespace rl
