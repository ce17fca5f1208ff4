#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rl/commands.hpp"

namespace {

struct CommonFlags {
  std::string experiment;
  std::string algorithm;
  std::string config_path;
  std::uint64_t seed = 0;
  std::string out_dir = ".";
  int episodes = 0;
  CLI::Option* seed_opt = nullptr;
  CLI::Option* episodes_opt = nullptr;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--experiment", f.experiment, "taxi | cartpole | highway")
      ->required();
  cmd->add_option("--algo", f.algorithm, "tabular | dqn | ddqn | random")
      ->required();
  cmd->add_option("--config", f.config_path,
                  "flat key = value configuration file");
  f.seed_opt = cmd->add_option("--seed", f.seed, "random seed (u64)");
  cmd->add_option("--out", f.out_dir, "output directory (default .)");
}

rl::RunConfig resolve(const CommonFlags& f, bool episodes_are_eval) {
  rl::RunConfig config = rl::default_run_config(
      rl::experiment_from_string(f.experiment),
      rl::algorithm_from_string(f.algorithm));
  if (!f.config_path.empty()) rl::apply_config_file(config, f.config_path);
  if (f.seed_opt->count() > 0) config.seed = f.seed;
  if (f.episodes_opt != nullptr && f.episodes_opt->count() > 0) {
    if (episodes_are_eval) {
      config.eval_episodes = f.episodes;
    } else if (config.experiment == rl::Experiment::Taxi) {
      config.tabular.episodes = f.episodes;
    } else {
      config.dqn.episode_budget = f.episodes;
    }
  }
  config.out_dir = f.out_dir;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Value-based reinforcement-learning toolkit: tabular Q-learning and "
      "DQN/DDQN on taxi, cart-pole, and highway environments."};
  app.require_subcommand(1);

  CommonFlags train_flags;
  CLI::App* train = app.add_subcommand("train", "train an agent");
  add_common(train, train_flags);
  train_flags.episodes_opt = train->add_option(
      "--episodes", train_flags.episodes, "training episode budget override");

  CommonFlags eval_flags;
  std::string checkpoint_path;
  std::string baseline;
  CLI::App* eval = app.add_subcommand("eval", "evaluate a checkpoint greedily");
  add_common(eval, eval_flags);
  eval->add_option("--checkpoint", checkpoint_path,
                   "model checkpoint to evaluate");
  eval_flags.episodes_opt = eval->add_option(
      "--episodes", eval_flags.episodes, "evaluation episode count");
  eval->add_option("--baseline", baseline,
                   "'random' appends a random-policy row");

  std::vector<std::string> curve_paths;
  std::string plot_out = ".";
  CLI::App* plot = app.add_subcommand("plot", "render curve CSVs to SVG");
  plot->add_option("curves", curve_paths, "curve.csv files")
      ->required()
      ->expected(-1);
  plot->add_option("--out", plot_out, "output directory (default .)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (train->parsed()) {
      return rl::cmd_train(resolve(train_flags, false));
    }
    if (eval->parsed()) {
      if (!baseline.empty() && baseline != "random") {
        throw rl::ConfigError("--baseline only supports 'random'");
      }
      const rl::RunConfig config = resolve(eval_flags, true);
      if (checkpoint_path.empty() &&
          config.algorithm != rl::Algorithm::Random) {
        throw rl::ConfigError("--checkpoint is required unless --algo random");
      }
      return rl::cmd_eval(config, checkpoint_path, baseline == "random");
    }
    return rl::cmd_plot(curve_paths, plot_out);
  } catch (const rl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
