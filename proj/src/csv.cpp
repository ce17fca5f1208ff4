#include "rl/csv.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "rl/format.hpp"

namespace rl {

std::vector<double> moving_average_50(const std::vector<double>& rewards) {
  std::vector<double> out(rewards.size());
  double window_sum = 0.0;
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    window_sum += rewards[i];
    if (i >= 50) window_sum -= rewards[i - 50];
    out[i] = window_sum / static_cast<double>(std::min<std::size_t>(i + 1, 50));
  }
  return out;
}

void write_curve_csv(const std::string& path,
                     const std::vector<double>& rewards,
                     const std::vector<double>& epsilons) {
  if (rewards.size() != epsilons.size()) {
    throw std::invalid_argument("curve: rewards/epsilons length mismatch");
  }
  const std::vector<double> ma = moving_average_50(rewards);
  std::string out = "episode,total_reward,epsilon,moving_avg_50\n";
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    out += std::to_string(i + 1);
    out += ',';
    out += format_double(rewards[i]);
    out += ',';
    out += format_double(epsilons[i]);
    out += ',';
    out += format_double(ma[i]);
    out += '\n';
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("write failed: " + path);
}

CurveSeries read_curve_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open curve file: " + path);
  std::string line;
  if (!std::getline(file, line) ||
      line != "episode,total_reward,epsilon,moving_avg_50") {
    throw std::runtime_error("malformed curve header in " + path);
  }
  CurveSeries series;
  series.label = std::filesystem::path(path).stem().string();
  int line_number = 1;
  while (std::getline(file, line)) {
    ++line_number;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    double values[4];
    for (int i = 0; i < 4; ++i) {
      if (!std::getline(ss, cell, ',')) {
        throw std::runtime_error(path + " line " +
                                 std::to_string(line_number) +
                                 ": expected 4 columns");
      }
      try {
        std::size_t used = 0;
        values[i] = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw std::runtime_error(path + " line " +
                                 std::to_string(line_number) +
                                 ": bad number '" + cell + "'");
      }
    }
    series.episodes.push_back(values[0]);
    series.rewards.push_back(values[1]);
    series.moving_avg.push_back(values[3]);
  }
  if (series.episodes.empty()) {
    throw std::runtime_error("no data rows in " + path);
  }
  return series;
}

void write_eval_csv(
    const std::string& path,
    const std::vector<std::pair<std::string, EvalStats>>& rows) {
  if (rows.empty()) throw std::invalid_argument("eval: no rows");
  std::string out =
      "policy,penalties_per_episode,timesteps_per_trip,reward_per_move,"
      "mean_return\n";
  for (const auto& [label, stats] : rows) {
    out += label;
    out += ',';
    out += format_double(stats.penalties_per_episode);
    out += ',';
    out += format_double(stats.timesteps_per_trip);
    out += ',';
    out += format_double(stats.reward_per_move);
    out += ',';
    out += format_double(stats.mean_return);
    out += '\n';
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write " + path);
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw std::runtime_error("write failed: " + path);
}

}  // namespace rl
