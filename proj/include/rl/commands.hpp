#pragma once

#include <string>
#include <vector>

#include "rl/config.hpp"

namespace rl {

// Trains per the resolved config and writes curve.csv, checkpoint.bin,
// manifest.txt (and steps.csv for replay-based runs) into config.out_dir.
// Returns a process exit code: 0 ok, 1 config error, 2 runtime failure.
int cmd_train(const RunConfig& config);

// Evaluates a checkpoint (or the random policy) greedily and writes eval.csv;
// highway runs also write trajectory.csv. `baseline_random` appends a
// random-policy row. Exit codes as for cmd_train.
int cmd_eval(const RunConfig& config, const std::string& checkpoint_path,
             bool baseline_random);

// Renders one SVG (plot.svg in out_dir) overlaying the given curve files.
int cmd_plot(const std::vector<std::string>& curve_paths,
             const std::string& out_dir);

}  // namespace rl
