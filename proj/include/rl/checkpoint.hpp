#pragma once

#include <optional>
#include <string>

#include "rl/config.hpp"
#include "rl/net.hpp"
#include "rl/tabular.hpp"

namespace rl {

// Binary model snapshot. Layout: 16-byte header (8-byte magic, u32 version,
// u32 reserved), then little-endian 64-bit floats only: experiment tag,
// algorithm tag, payload dimensions, payload values (row-major).
struct Checkpoint {
  Experiment experiment = Experiment::Taxi;
  Algorithm algorithm = Algorithm::Tabular;
  std::optional<QTable> q;    // tabular payload
  std::optional<Network> net; // dqn/ddqn payload
};

void save_checkpoint(const std::string& path, const Checkpoint& ckpt);

// Throws std::runtime_error on missing file, bad magic, unsupported version,
// or truncation.
Checkpoint load_checkpoint(const std::string& path);

// Loads and additionally rejects checkpoints whose experiment tag differs.
Checkpoint load_checkpoint_for(const std::string& path, Experiment expected);

}  // namespace rl
