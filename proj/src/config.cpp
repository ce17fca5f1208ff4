#include "rl/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "rl/format.hpp"

namespace rl {

namespace {

std::string strip(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

[[noreturn]] void fail(const std::string& where, const std::string& message) {
  throw ConfigError(where.empty() ? message : where + ": " + message);
}

double parse_double(const std::string& v, const std::string& where) {
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    fail(where, "expected a number, got '" + v + "'");
  }
}

long long parse_int(const std::string& v, const std::string& where) {
  try {
    std::size_t used = 0;
    const long long x = std::stoll(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    fail(where, "expected an integer, got '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& v, const std::string& where) {
  try {
    std::size_t used = 0;
    const std::uint64_t x = std::stoull(v, &used);
    if (used != v.size() || v.find('-') != std::string::npos) {
      throw std::invalid_argument("trailing characters");
    }
    return x;
  } catch (const std::exception&) {
    fail(where, "expected an unsigned integer, got '" + v + "'");
  }
}

std::vector<int> parse_int_list(const std::string& v,
                                const std::string& where) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = strip(item);
    if (item.empty()) fail(where, "empty list entry in '" + v + "'");
    out.push_back(static_cast<int>(parse_int(item, where)));
  }
  return out;
}

std::optional<double> parse_optional_double(const std::string& v,
                                            const std::string& where) {
  if (v == "none") return std::nullopt;
  return parse_double(v, where);
}

std::string render_optional(const std::optional<double>& v) {
  return v.has_value() ? format_double(*v) : "none";
}

std::string render_int_list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

bool uses_dqn(const RunConfig& c) {
  return c.experiment != Experiment::Taxi &&
         (c.algorithm == Algorithm::Dqn || c.algorithm == Algorithm::Ddqn);
}

}  // namespace

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::Taxi: return "taxi";
    case Experiment::Cartpole: return "cartpole";
    case Experiment::Highway: return "highway";
  }
  throw std::logic_error("unknown experiment");
}

std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Tabular: return "tabular";
    case Algorithm::Dqn: return "dqn";
    case Algorithm::Ddqn: return "ddqn";
    case Algorithm::Random: return "random";
  }
  throw std::logic_error("unknown algorithm");
}

Experiment experiment_from_string(const std::string& s) {
  if (s == "taxi") return Experiment::Taxi;
  if (s == "cartpole") return Experiment::Cartpole;
  if (s == "highway") return Experiment::Highway;
  throw ConfigError("unknown experiment: " + s);
}

Algorithm algorithm_from_string(const std::string& s) {
  if (s == "tabular") return Algorithm::Tabular;
  if (s == "dqn") return Algorithm::Dqn;
  if (s == "ddqn") return Algorithm::Ddqn;
  if (s == "random") return Algorithm::Random;
  throw ConfigError("unknown algorithm: " + s);
}

RunConfig default_run_config(Experiment experiment, Algorithm algorithm) {
  RunConfig c;
  c.experiment = experiment;
  c.algorithm = algorithm;
  switch (experiment) {
    case Experiment::Taxi:
      // TabularParams defaults already carry the taxi training parameters.
      if (algorithm == Algorithm::Random) c.taxi_max_steps = 5000;
      break;
    case Experiment::Cartpole:
      c.dqn.discount = 0.95;
      c.dqn.learning_rate = 0.001;
      c.dqn.batch_size = 64;
      c.dqn.buffer_capacity = 2000;
      c.dqn.warmup = 1000;
      c.dqn.target_sync_interval = 500;
      c.dqn.hidden_layers = {512, 256, 64};
      c.dqn.schedule.kind = ExplorationSchedule::Kind::MultiplicativePerReplay;
      c.dqn.schedule.initial = 1.0;
      c.dqn.schedule.final_value = 0.001;
      c.dqn.schedule.decay = 0.995;
      c.dqn.terminal_failure_reward = -100.0;
      c.dqn.episode_budget = 1000;
      c.dqn.timestep_budget = 0;
      break;
    case Experiment::Highway:
      c.dqn.discount = 0.99;
      c.dqn.learning_rate = 5e-4;
      c.dqn.batch_size = 32;
      c.dqn.buffer_capacity = 50000;
      c.dqn.warmup = 100;
      c.dqn.target_sync_interval = 500;
      c.dqn.hidden_layers = {64, 64};
      c.dqn.schedule.kind = ExplorationSchedule::Kind::LinearByTimestep;
      c.dqn.schedule.initial = 1.0;
      c.dqn.schedule.final_value = 0.02;
      c.dqn.schedule.fraction = 0.1;
      c.dqn.terminal_failure_reward = std::nullopt;
      c.dqn.episode_budget = 0;
      c.dqn.timestep_budget = 20000;
      break;
  }
  c.dqn.variant =
      algorithm == Algorithm::Ddqn ? DqnVariant::Ddqn : DqnVariant::Dqn;
  return c;
}

void apply_config_key(RunConfig& c, const std::string& key,
                      const std::string& value, const std::string& where) {
  if (key == "experiment") {
    if (experiment_from_string(value) != c.experiment) {
      fail(where, "config experiment '" + value +
                      "' conflicts with the requested experiment '" +
                      to_string(c.experiment) + "'");
    }
    return;
  }
  if (key == "algorithm") {
    if (algorithm_from_string(value) != c.algorithm) {
      fail(where, "config algorithm '" + value +
                      "' conflicts with the requested algorithm '" +
                      to_string(c.algorithm) + "'");
    }
    return;
  }
  if (key == "seed") {
    c.seed = parse_u64(value, where);
    return;
  }
  if (key == "eval_episodes") {
    c.eval_episodes = static_cast<int>(parse_int(value, where));
    return;
  }

  if (c.experiment == Experiment::Taxi) {
    if (key == "learning_rate") c.tabular.learning_rate = parse_double(value, where);
    else if (key == "discount") c.tabular.discount = parse_double(value, where);
    else if (key == "epsilon_initial") c.tabular.epsilon_initial = parse_double(value, where);
    else if (key == "epsilon_floor") c.tabular.epsilon_floor = parse_double(value, where);
    else if (key == "epsilon_decay") c.tabular.epsilon_decay = parse_double(value, where);
    else if (key == "decay_warmup_episodes") c.tabular.decay_warmup_episodes = static_cast<int>(parse_int(value, where));
    else if (key == "episodes") c.tabular.episodes = static_cast<int>(parse_int(value, where));
    else if (key == "max_episode_steps") c.taxi_max_steps = static_cast<int>(parse_int(value, where));
    else fail(where, "unknown key '" + key + "' for experiment taxi");
    return;
  }

  // cartpole / highway: DQN keys first, then highway environment keys.
  if (key == "discount") c.dqn.discount = parse_double(value, where);
  else if (key == "learning_rate") c.dqn.learning_rate = parse_double(value, where);
  else if (key == "batch_size") c.dqn.batch_size = static_cast<int>(parse_int(value, where));
  else if (key == "buffer_capacity") c.dqn.buffer_capacity = static_cast<std::size_t>(parse_int(value, where));
  else if (key == "warmup") c.dqn.warmup = static_cast<std::size_t>(parse_int(value, where));
  else if (key == "target_sync_interval") c.dqn.target_sync_interval = static_cast<int>(parse_int(value, where));
  else if (key == "hidden_layers") c.dqn.hidden_layers = parse_int_list(value, where);
  else if (key == "schedule") {
    if (value == "multiplicative") c.dqn.schedule.kind = ExplorationSchedule::Kind::MultiplicativePerReplay;
    else if (value == "linear") c.dqn.schedule.kind = ExplorationSchedule::Kind::LinearByTimestep;
    else fail(where, "schedule must be 'multiplicative' or 'linear'");
  }
  else if (key == "epsilon_initial") c.dqn.schedule.initial = parse_double(value, where);
  else if (key == "epsilon_final") c.dqn.schedule.final_value = parse_double(value, where);
  else if (key == "epsilon_decay") c.dqn.schedule.decay = parse_double(value, where);
  else if (key == "exploration_fraction") c.dqn.schedule.fraction = parse_double(value, where);
  else if (key == "terminal_failure_reward") c.dqn.terminal_failure_reward = parse_optional_double(value, where);
  else if (key == "episodes") c.dqn.episode_budget = static_cast<int>(parse_int(value, where));
  else if (key == "timesteps") c.dqn.timestep_budget = parse_int(value, where);
  else if (key == "early_stop_moving_avg") c.dqn.early_stop_moving_avg = parse_optional_double(value, where);
  else if (key == "early_stop_window") c.dqn.early_stop_window = static_cast<int>(parse_int(value, where));
  else if (c.experiment == Experiment::Highway && key == "lanes_count") c.highway.lanes_count = static_cast<int>(parse_int(value, where));
  else if (c.experiment == Experiment::Highway && key == "vehicles_count") c.highway.vehicles_count = static_cast<int>(parse_int(value, where));
  else if (c.experiment == Experiment::Highway && key == "vehicles_density") c.highway.vehicles_density = parse_double(value, where);
  else if (c.experiment == Experiment::Highway && key == "duration") c.highway.duration = static_cast<int>(parse_int(value, where));
  else if (c.experiment == Experiment::Highway && key == "v_min") c.highway.v_min = parse_double(value, where);
  else if (c.experiment == Experiment::Highway && key == "v_max") c.highway.v_max = parse_double(value, where);
  else if (c.experiment == Experiment::Highway && key == "speed_coeff") c.highway.speed_coeff = parse_double(value, where);
  else if (c.experiment == Experiment::Highway && key == "collision_coeff") c.highway.collision_coeff = parse_double(value, where);
  else if (c.experiment == Experiment::Highway && key == "right_lane_coeff") c.highway.right_lane_coeff = parse_double(value, where);
  else if (c.experiment == Experiment::Highway && key == "decision_timestep") c.highway.timestep = parse_double(value, where);
  else {
    fail(where, "unknown key '" + key + "' for experiment " +
                    to_string(c.experiment));
  }
}

void apply_config_file(RunConfig& config, const std::string& path) {
  std::ifstream file(path);
  if (!file) throw ConfigError("cannot open config file: " + path);
  std::string line;
  int line_number = 0;
  std::set<std::string> seen;
  while (std::getline(file, line)) {
    ++line_number;
    const std::string where = path + " line " + std::to_string(line_number);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      fail(where, "expected 'key = value', got '" + line + "'");
    }
    const std::string key = strip(line.substr(0, eq));
    const std::string value = strip(line.substr(eq + 1));
    if (key.empty()) fail(where, "empty key");
    if (value.empty()) fail(where, "empty value for key '" + key + "'");
    if (!seen.insert(key).second) fail(where, "duplicate key '" + key + "'");
    apply_config_key(config, key, value, where);
  }
}

void validate(const RunConfig& c) {
  const bool ok =
      (c.experiment == Experiment::Taxi &&
       (c.algorithm == Algorithm::Tabular || c.algorithm == Algorithm::Random)) ||
      (c.experiment != Experiment::Taxi &&
       (c.algorithm == Algorithm::Dqn || c.algorithm == Algorithm::Ddqn ||
        c.algorithm == Algorithm::Random));
  if (!ok) {
    throw ConfigError("algorithm '" + to_string(c.algorithm) +
                      "' is not available for experiment '" +
                      to_string(c.experiment) + "'");
  }
  if (c.eval_episodes < 1) throw ConfigError("eval_episodes must be >= 1");
  try {
    if (c.experiment == Experiment::Taxi) {
      if (c.taxi_max_steps < 1) throw ConfigError("max_episode_steps must be >= 1");
      if (c.algorithm == Algorithm::Tabular) validate(c.tabular);
    } else if (uses_dqn(c)) {
      validate(c.dqn);
    }
    if (c.experiment == Experiment::Highway) validate(c.highway);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

std::string render_manifest(const RunConfig& c) {
  std::string out;
  out += "# resolved run configuration\n";
  out += "experiment = " + to_string(c.experiment) + "\n";
  out += "algorithm = " + to_string(c.algorithm) + "\n";
  out += "seed = " + std::to_string(c.seed) + "\n";
  out += "eval_episodes = " + std::to_string(c.eval_episodes) + "\n";
  if (c.experiment == Experiment::Taxi) {
    out += "learning_rate = " + format_double(c.tabular.learning_rate) + "\n";
    out += "discount = " + format_double(c.tabular.discount) + "\n";
    out += "epsilon_initial = " + format_double(c.tabular.epsilon_initial) + "\n";
    out += "epsilon_floor = " + format_double(c.tabular.epsilon_floor) + "\n";
    out += "epsilon_decay = " + format_double(c.tabular.epsilon_decay) + "\n";
    out += "decay_warmup_episodes = " +
           std::to_string(c.tabular.decay_warmup_episodes) + "\n";
    out += "episodes = " + std::to_string(c.tabular.episodes) + "\n";
    out += "max_episode_steps = " + std::to_string(c.taxi_max_steps) + "\n";
    return out;
  }
  out += "discount = " + format_double(c.dqn.discount) + "\n";
  out += "learning_rate = " + format_double(c.dqn.learning_rate) + "\n";
  out += "batch_size = " + std::to_string(c.dqn.batch_size) + "\n";
  out += "buffer_capacity = " + std::to_string(c.dqn.buffer_capacity) + "\n";
  out += "warmup = " + std::to_string(c.dqn.warmup) + "\n";
  out += "target_sync_interval = " +
         std::to_string(c.dqn.target_sync_interval) + "\n";
  out += "hidden_layers = " + render_int_list(c.dqn.hidden_layers) + "\n";
  out += std::string("schedule = ") +
         (c.dqn.schedule.kind == ExplorationSchedule::Kind::LinearByTimestep
              ? "linear"
              : "multiplicative") +
         "\n";
  out += "epsilon_initial = " + format_double(c.dqn.schedule.initial) + "\n";
  out += "epsilon_final = " + format_double(c.dqn.schedule.final_value) + "\n";
  out += "epsilon_decay = " + format_double(c.dqn.schedule.decay) + "\n";
  out += "exploration_fraction = " + format_double(c.dqn.schedule.fraction) + "\n";
  out += "terminal_failure_reward = " +
         render_optional(c.dqn.terminal_failure_reward) + "\n";
  out += "episodes = " + std::to_string(c.dqn.episode_budget) + "\n";
  out += "timesteps = " + std::to_string(c.dqn.timestep_budget) + "\n";
  out += "early_stop_moving_avg = " +
         render_optional(c.dqn.early_stop_moving_avg) + "\n";
  out += "early_stop_window = " + std::to_string(c.dqn.early_stop_window) + "\n";
  if (c.experiment == Experiment::Highway) {
    out += "lanes_count = " + std::to_string(c.highway.lanes_count) + "\n";
    out += "vehicles_count = " + std::to_string(c.highway.vehicles_count) + "\n";
    out += "vehicles_density = " + format_double(c.highway.vehicles_density) + "\n";
    out += "duration = " + std::to_string(c.highway.duration) + "\n";
    out += "v_min = " + format_double(c.highway.v_min) + "\n";
    out += "v_max = " + format_double(c.highway.v_max) + "\n";
    out += "speed_coeff = " + format_double(c.highway.speed_coeff) + "\n";
    out += "collision_coeff = " + format_double(c.highway.collision_coeff) + "\n";
    out += "right_lane_coeff = " + format_double(c.highway.right_lane_coeff) + "\n";
    out += "decision_timestep = " + format_double(c.highway.timestep) + "\n";
  }
  return out;
}

}  // namespace rl
