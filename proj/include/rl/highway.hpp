#pragma once

#include <cstdint>
#include <ostream>
#include <vector>

#include <Eigen/Dense>

#include "rl/env.hpp"
#include "rl/rng.hpp"

namespace rl {

inline constexpr double kVehicleLength = 5.0;  // m
inline constexpr double kVehicleWidth = 2.0;   // m
inline constexpr double kLaneWidth = 4.0;      // m
inline constexpr double kHighwayAccel = 5.0;   // m/s^2, ego relax + ambient brake

struct HighwayConfig {
  int lanes_count = 4;
  int vehicles_count = 50;
  double vehicles_density = 1.0;
  int duration = 120;  // decision steps per episode
  double v_min = 20.0;
  double v_max = 30.0;
  double speed_coeff = 0.4;      // a
  double collision_coeff = 1.0;  // b, applied negatively
  double right_lane_coeff = 0.1; // c
  double timestep = 0.25;        // s per decision step
};

struct Vehicle {
  int lane = 0;
  int target_lane = 0;
  double lateral_offset = 0.0;  // fraction of the change completed, in [0,1)
  double s = 0.0;               // m
  double v = 0.0;               // m/s

  double y() const {
    return (lane + (target_lane - lane) * lateral_offset) * kLaneWidth;
  }
  // Lateral speed: one lane width per 4 decision steps of 0.25 s.
  double lateral_speed() const {
    if (target_lane == lane) return 0.0;
    return target_lane > lane ? kLaneWidth : -kLaneWidth;
  }
};

struct HighwayWorld {
  Vehicle ego;
  double ego_target_speed = 0.0;
  std::vector<Vehicle> others;
};

struct HighwayOutcome {
  double reward = 0.0;
  bool collided = false;
};

double highway_reward(double v, bool collided, int lane,
                      const HighwayConfig& config);

HighwayWorld highway_spawn(const HighwayConfig& config, Rng& rng);

HighwayOutcome highway_world_step(HighwayWorld& world, int action,
                                  const HighwayConfig& config, Rng& rng);

bool highway_collided(const HighwayWorld& world);

// 5 rows x 5 features [presence, s, y, v, lateral v], ego row first, then the
// 4 nearest others by |delta s|; relative quantities for the others; every
// entry scaled to [-1,1]. Flattened row-major.
Eigen::VectorXd highway_observe(const HighwayWorld& world,
                                const HighwayConfig& config);

class HighwayEnv final : public Env {
 public:
  explicit HighwayEnv(std::uint64_t seed, HighwayConfig config = {});

  const HighwayConfig& config() const { return config_; }
  const HighwayWorld& world() const { return world_; }
  HighwayWorld& mutable_world() { return world_; }

  // When set, every step appends one CSV row; the header is written on
  // attach. Pass nullptr to detach. The stream must outlive the env.
  void set_trajectory_sink(std::ostream* sink);

 protected:
  Observation do_reset() override;
  StepResult do_step(int action) override;

 private:
  HighwayConfig config_;
  HighwayWorld world_;
  std::ostream* trajectory_sink_ = nullptr;
  int trajectory_step_ = 0;
};

void validate(const HighwayConfig& config);

}  // namespace rl
