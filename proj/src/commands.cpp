#include "rl/commands.hpp"

#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>

#include "rl/cartpole.hpp"
#include "rl/checkpoint.hpp"
#include "rl/csv.hpp"
#include "rl/plot.hpp"
#include "rl/taxi.hpp"

namespace rl {

namespace {

void write_file(const std::string& path, const std::string& content) {
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw std::runtime_error("cannot write " + path);
  file.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!file) throw std::runtime_error("write failed: " + path);
}

std::unique_ptr<Env> make_env(const RunConfig& config, std::uint64_t seed) {
  switch (config.experiment) {
    case Experiment::Taxi:
      return std::make_unique<TaxiEnv>(seed, config.taxi_max_steps);
    case Experiment::Cartpole:
      return std::make_unique<CartPoleEnv>(seed);
    case Experiment::Highway:
      return std::make_unique<HighwayEnv>(seed, config.highway);
  }
  throw std::logic_error("unknown experiment");
}

Policy policy_for_net(const Network& net) {
  return [net](const Observation& obs, Rng& rng) {
    return act(net, obs, 0.0, rng);
  };
}

int run_guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace

int cmd_train(const RunConfig& config) {
  return run_guarded([&] {
    validate(config);
    if (config.algorithm == Algorithm::Random) {
      throw ConfigError("the random policy has nothing to train");
    }
    const std::filesystem::path out(config.out_dir);
    std::filesystem::create_directories(out);

    Rng rng(config.seed);
    const std::uint64_t env_seed = rng.next_u64();
    std::unique_ptr<Env> env = make_env(config, env_seed);

    Checkpoint ckpt;
    ckpt.experiment = config.experiment;
    ckpt.algorithm = config.algorithm;
    std::vector<double> rewards;
    std::vector<double> epsilons;

    if (config.algorithm == Algorithm::Tabular) {
      TabularResult result = train_tabular(*env, config.tabular, rng);
      rewards = std::move(result.episode_rewards);
      epsilons = std::move(result.episode_epsilons);
      ckpt.q = std::move(result.q);
    } else {
      std::ofstream steps((out / "steps.csv").string(),
                          std::ios::binary | std::ios::trunc);
      if (!steps) {
        throw std::runtime_error("cannot write " + (out / "steps.csv").string());
      }
      DqnResult result = train_dqn(*env, config.dqn, rng, &steps);
      rewards = std::move(result.episode_rewards);
      epsilons = std::move(result.episode_epsilons);
      ckpt.net = std::move(result.net);
    }

    write_curve_csv((out / "curve.csv").string(), rewards, epsilons);
    save_checkpoint((out / "checkpoint.bin").string(), ckpt);
    write_file((out / "manifest.txt").string(), render_manifest(config));

    const std::vector<double> ma = moving_average_50(rewards);
    std::cout << "trained " << to_string(config.experiment) << '/'
              << to_string(config.algorithm) << ": " << rewards.size()
              << " episodes";
    if (!ma.empty()) std::cout << ", final moving average " << ma.back();
    std::cout << ", outputs in " << out.string() << '\n';
  });
}

int cmd_eval(const RunConfig& config, const std::string& checkpoint_path,
             bool baseline_random) {
  return run_guarded([&] {
    validate(config);
    const std::filesystem::path out(config.out_dir);
    std::filesystem::create_directories(out);

    Rng rng(config.seed);
    const std::uint64_t env_seed = rng.next_u64();
    const std::uint64_t baseline_seed = rng.next_u64();

    Policy policy;
    if (config.algorithm == Algorithm::Random) {
      RunConfig probe = config;  // descriptor only
      policy = random_policy(make_env(probe, env_seed)->descriptor());
    } else if (config.algorithm == Algorithm::Tabular) {
      const Checkpoint ckpt =
          load_checkpoint_for(checkpoint_path, config.experiment);
      if (!ckpt.q.has_value()) {
        throw std::runtime_error("checkpoint is not a tabular model: " +
                                 checkpoint_path);
      }
      policy = greedy_policy(*ckpt.q);
    } else {
      const Checkpoint ckpt =
          load_checkpoint_for(checkpoint_path, config.experiment);
      if (!ckpt.net.has_value()) {
        throw std::runtime_error("checkpoint is not a network model: " +
                                 checkpoint_path);
      }
      policy = policy_for_net(*ckpt.net);
    }

    std::unique_ptr<Env> env = make_env(config, env_seed);
    std::ofstream trajectory;
    if (config.experiment == Experiment::Highway) {
      trajectory.open((out / "trajectory.csv").string(),
                      std::ios::binary | std::ios::trunc);
      static_cast<HighwayEnv*>(env.get())->set_trajectory_sink(&trajectory);
    }
    std::vector<std::pair<std::string, EvalStats>> rows;
    rows.emplace_back(to_string(config.algorithm),
                      evaluate(*env, policy, config.eval_episodes, rng));

    if (baseline_random && config.algorithm != Algorithm::Random) {
      RunConfig baseline = config;
      if (config.experiment == Experiment::Taxi) {
        // Random trips overrun the 200-step learning cap by an order of
        // magnitude; the baseline gets 5000 steps so trips can complete.
        baseline.taxi_max_steps = 5000;
      }
      std::unique_ptr<Env> env2 = make_env(baseline, baseline_seed);
      rows.emplace_back("random",
                        evaluate(*env2, random_policy(env2->descriptor()),
                                 config.eval_episodes, rng));
    }

    write_eval_csv((out / "eval.csv").string(), rows);
    for (const auto& [label, stats] : rows) {
      std::cout << label << ": penalties/episode " << stats.penalties_per_episode
                << ", timesteps/trip " << stats.timesteps_per_trip
                << ", reward/move " << stats.reward_per_move
                << ", mean return " << stats.mean_return << '\n';
    }
  });
}

int cmd_plot(const std::vector<std::string>& curve_paths,
             const std::string& out_dir) {
  return run_guarded([&] {
    if (curve_paths.empty()) throw ConfigError("no curve files given");
    std::vector<CurveSeries> series;
    series.reserve(curve_paths.size());
    for (const std::string& path : curve_paths) {
      series.push_back(read_curve_csv(path));
    }
    const std::filesystem::path out(out_dir);
    std::filesystem::create_directories(out);
    const std::string svg_path = (out / "plot.svg").string();
    write_file(svg_path, render_curves_svg(series));
    std::cout << "wrote " << svg_path << '\n';
  });
}

}  // namespace rl
