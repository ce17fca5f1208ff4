#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "rl/dqn.hpp"
#include "rl/highway.hpp"
#include "rl/tabular.hpp"

namespace rl {

enum class Experiment { Taxi, Cartpole, Highway };
enum class Algorithm { Tabular, Dqn, Ddqn, Random };

std::string to_string(Experiment e);
std::string to_string(Algorithm a);
Experiment experiment_from_string(const std::string& s);
Algorithm algorithm_from_string(const std::string& s);

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fully-resolved run description: experiment/algorithm pair, seed, and the
// owning parameter blocks. Built from per-experiment defaults, then a flat
// `key = value` config file, then command-line flags, in that order.
struct RunConfig {
  Experiment experiment = Experiment::Taxi;
  Algorithm algorithm = Algorithm::Tabular;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int eval_episodes = 100;
  TabularParams tabular;   // taxi
  int taxi_max_steps = 200;
  DqnConfig dqn;           // cartpole / highway
  HighwayConfig highway;   // highway
};

RunConfig default_run_config(Experiment experiment, Algorithm algorithm);

// Applies `key = value` lines (UTF-8, '#' comments, blank lines ignored).
// Unknown keys, malformed values, duplicate keys, and experiment/algorithm
// keys that contradict the resolved pair raise ConfigError naming the line.
void apply_config_file(RunConfig& config, const std::string& path);

// Single key application; `where` prefixes error messages (e.g. "line 3").
void apply_config_key(RunConfig& config, const std::string& key,
                      const std::string& value, const std::string& where);

// Cross-field checks plus the owning blocks' own invariants.
void validate(const RunConfig& config);

// Flat rendering of every resolved field; applying it to a default config of
// the same experiment/algorithm pair reproduces the run exactly.
std::string render_manifest(const RunConfig& config);

}  // namespace rl
