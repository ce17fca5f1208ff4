#pragma once

#include <array>
#include <string>
#include <vector>

#include "rl/env.hpp"

namespace rl {

// 5x5 taxi gridworld: 500 states = 25 taxi cells x 5 passenger locations
// (4 landmarks + in-taxi) x 4 destinations. Actions:
//   0 south, 1 north, 2 east, 3 west, 4 pickup, 5 dropoff.
// Rewards: -1 per step, -10 for an illegal pickup/dropoff, +20 for dropping
// the passenger at the destination (terminal).

inline constexpr int kTaxiGridSize = 5;
inline constexpr int kTaxiStateCount = 500;
inline constexpr int kTaxiActionCount = 6;

// Landmark cells in index order R, G, Y, B.
inline constexpr std::array<std::array<int, 2>, 4> kTaxiLandmarks{
    {{0, 0}, {0, 4}, {4, 0}, {4, 3}}};

struct TaxiState {
  int row = 0;
  int col = 0;
  int passenger = 0;    // 0..3 landmark index, 4 = in taxi
  int destination = 0;  // 0..3 landmark index
};

struct TaxiOutcome {
  int next_state = 0;
  double reward = 0.0;
  bool done = false;
};

int taxi_encode(int row, int col, int passenger, int destination);
TaxiState taxi_decode(int state_id);

// True when a wall blocks horizontal movement between (row, col) and
// (row, col + 1). Vertical movement is never walled inside the grid.
bool taxi_wall_east_of(int row, int col);

// Deterministic transition function over encoded state ids.
TaxiOutcome taxi_step(int state_id, int action);

// All states the start distribution can produce: passenger at a landmark
// (not in the taxi) and passenger != destination.
std::vector<int> taxi_valid_starts();

// Character-grid rendering with taxi/passenger/destination markers.
std::string taxi_render(int state_id);

class TaxiEnv : public Env {
 public:
  explicit TaxiEnv(std::uint64_t seed, int max_episode_steps = 200);

  int state() const { return state_; }

 protected:
  Observation do_reset() override;
  StepResult do_step(int action) override;

 private:
  int state_ = 0;
};

}  // namespace rl
