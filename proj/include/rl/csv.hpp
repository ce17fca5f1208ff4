#pragma once

#include <string>
#include <vector>

#include "rl/tabular.hpp"

namespace rl {

// Trailing mean over a window of at most 50 episodes: entry i averages
// rewards[max(0, i-49) .. i].
std::vector<double> moving_average_50(const std::vector<double>& rewards);

// Columns: episode,total_reward,epsilon,moving_avg_50. One row per episode,
// episodes numbered from 1. Throws on non-finite values.
void write_curve_csv(const std::string& path,
                     const std::vector<double>& rewards,
                     const std::vector<double>& epsilons);

struct CurveSeries {
  std::string label;
  std::vector<double> episodes;
  std::vector<double> rewards;
  std::vector<double> moving_avg;
};

// Parses a curve.csv back; throws std::runtime_error on a malformed header,
// unparseable row, or a file with no data rows.
CurveSeries read_curve_csv(const std::string& path);

// Columns: policy,penalties_per_episode,timesteps_per_trip,reward_per_move,
// mean_return. One labeled row per evaluated policy.
void write_eval_csv(const std::string& path,
                    const std::vector<std::pair<std::string, EvalStats>>& rows);

}  // namespace rl
