#include "rl/taxi.hpp"

#include <stdexcept>
#include <string>

namespace rl {

namespace {

void check_fields(int row, int col, int passenger, int destination) {
  if (row < 0 || row >= kTaxiGridSize || col < 0 || col >= kTaxiGridSize ||
      passenger < 0 || passenger > 4 || destination < 0 || destination > 3)
    throw std::invalid_argument("taxi_encode: field out of range");
}

bool at_landmark(int row, int col, int landmark) {
  return row == kTaxiLandmarks[landmark][0] &&
         col == kTaxiLandmarks[landmark][1];
}

// Landmark index of (row, col), or -1 when the cell is not a landmark.
int landmark_at(int row, int col) {
  for (int i = 0; i < 4; ++i)
    if (at_landmark(row, col, i)) return i;
  return -1;
}

}  // namespace

int taxi_encode(int row, int col, int passenger, int destination) {
  check_fields(row, col, passenger, destination);
  return ((row * 5 + col) * 5 + passenger) * 4 + destination;
}

TaxiState taxi_decode(int state_id) {
  if (state_id < 0 || state_id >= kTaxiStateCount)
    throw std::invalid_argument("taxi_decode: state id out of range");
  TaxiState s;
  s.destination = state_id % 4;
  state_id /= 4;
  s.passenger = state_id % 5;
  state_id /= 5;
  s.col = state_id % 5;
  s.row = state_id / 5;
  return s;
}

bool taxi_wall_east_of(int row, int col) {
  // Interior walls between horizontally adjacent cells.
  static constexpr std::array<std::array<int, 2>, 6> kWalls{
      {{0, 1}, {1, 1}, {3, 0}, {3, 2}, {4, 0}, {4, 2}}};
  for (const auto& w : kWalls)
    if (w[0] == row && w[1] == col) return true;
  return false;
}

TaxiOutcome taxi_step(int state_id, int action) {
  TaxiState s = taxi_decode(state_id);
  if (action < 0 || action >= kTaxiActionCount)
    throw std::invalid_argument("taxi_step: action out of range");

  double reward = -1.0;
  bool done = false;
  switch (action) {
    case 0:  // south
      if (s.row < kTaxiGridSize - 1) ++s.row;
      break;
    case 1:  // north
      if (s.row > 0) --s.row;
      break;
    case 2:  // east
      if (s.col < kTaxiGridSize - 1 && !taxi_wall_east_of(s.row, s.col))
        ++s.col;
      break;
    case 3:  // west
      if (s.col > 0 && !taxi_wall_east_of(s.row, s.col - 1)) --s.col;
      break;
    case 4:  // pickup
      if (s.passenger < 4 && at_landmark(s.row, s.col, s.passenger))
        s.passenger = 4;
      else
        reward = -10.0;
      break;
    case 5:  // dropoff
      if (s.passenger == 4 && at_landmark(s.row, s.col, s.destination)) {
        s.passenger = s.destination;
        reward = 20.0;
        done = true;
      } else if (s.passenger == 4 && landmark_at(s.row, s.col) >= 0) {
        // Passenger steps out at the wrong landmark; trip continues.
        s.passenger = landmark_at(s.row, s.col);
      } else {
        reward = -10.0;
      }
      break;
    default:
      break;
  }
  return TaxiOutcome{taxi_encode(s.row, s.col, s.passenger, s.destination),
                     reward, done};
}

std::vector<int> taxi_valid_starts() {
  std::vector<int> starts;
  starts.reserve(300);
  for (int row = 0; row < 5; ++row)
    for (int col = 0; col < 5; ++col)
      for (int p = 0; p < 4; ++p)
        for (int d = 0; d < 4; ++d)
          if (p != d) starts.push_back(taxi_encode(row, col, p, d));
  return starts;
}

std::string taxi_render(int state_id) {
  const TaxiState s = taxi_decode(state_id);
  static constexpr const char* kMap[] = {
      "+---------+",
      "|R: | : :G|",
      "| : | : : |",
      "| : : : : |",
      "| | : | : |",
      "|Y| : |B: |",
      "+---------+",
  };
  std::string out;
  for (int line = 0; line < 7; ++line) {
    std::string text = kMap[line];
    if (line >= 1 && line <= 5) {
      const int row = line - 1;
      // grid column c maps to text column 1 + 2c; taxi marker drawn last
      if (s.passenger < 4) {
        const auto& p = kTaxiLandmarks[s.passenger];
        if (p[0] == row) text[1 + 2 * p[1]] = 'p';
      }
      const auto& d = kTaxiLandmarks[s.destination];
      if (d[0] == row) text[1 + 2 * d[1]] = 'D';
      if (row == s.row) text[1 + 2 * s.col] = 'T';
    }
    out += text;
    out += '\n';
  }
  return out;
}

TaxiEnv::TaxiEnv(std::uint64_t seed, int max_episode_steps)
    : Env(EnvDescriptor{ObsKind::Discrete, 0, kTaxiStateCount,
                        kTaxiActionCount, max_episode_steps},
          seed) {}

Observation TaxiEnv::do_reset() {
  const int row = rng().uniform_int(5);
  const int col = rng().uniform_int(5);
  const int passenger = rng().uniform_int(4);
  int destination = rng().uniform_int(3);
  if (destination >= passenger) ++destination;
  state_ = taxi_encode(row, col, passenger, destination);
  return Observation::discrete(state_);
}

StepResult TaxiEnv::do_step(int action) {
  const TaxiOutcome out = taxi_step(state_, action);
  state_ = out.next_state;
  return StepResult{Observation::discrete(state_), out.reward, out.done};
}

}  // namespace rl
