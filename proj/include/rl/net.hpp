#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "rl/rng.hpp"

namespace rl {

// Weight is stored input x output so a batch forward is X * W + bias.
struct DenseLayer {
  Eigen::MatrixXd weight;
  Eigen::RowVectorXd bias;
};

// Feed-forward rectifier network with a linear output layer. Value-like:
// copyable, no shared state. layers may hold a single affine map (no hidden
// layers), which covers the plain linear Q-function.
struct Network {
  std::vector<DenseLayer> layers;

  int input_size() const {
    return static_cast<int>(layers.front().weight.rows());
  }
  int output_size() const {
    return static_cast<int>(layers.back().weight.cols());
  }
  std::int64_t parameter_count() const {
    std::int64_t n = 0;
    for (const DenseLayer& l : layers) n += l.weight.size() + l.bias.size();
    return n;
  }
};

// Weights ~ U(-sqrt(6/fan_in), +sqrt(6/fan_in)), biases zero.
Network init_network(const std::vector<int>& layer_sizes, Rng& rng);

Eigen::MatrixXd forward(const Network& net, const Eigen::MatrixXd& batch);

// Mean over all B*A entries of the squared difference.
double mse_loss(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target);

struct Gradients {
  std::vector<DenseLayer> layers;  // same shapes as the network
};

// Exact reverse-mode gradients of mse_loss(forward(net, batch), target).
// Rectifier subgradient is 0 at exactly 0.
Gradients backward(const Network& net, const Eigen::MatrixXd& batch,
                   const Eigen::MatrixXd& target);

struct AdamState {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t t = 0;
  std::vector<DenseLayer> m;  // first moments, shaped like the parameters
  std::vector<DenseLayer> v;  // second moments
};

AdamState make_adam(const Network& net, double learning_rate = 0.001);

// Standard bias-corrected Adam update, in place.
void adam_step(Network& net, const Gradients& grads, AdamState& state);

struct GradCheckReport {
  double max_rel_error = 0.0;
  int probes_evaluated = 0;
  int probes_skipped = 0;  // probes that landed within 1e-6 of a rectifier kink
  // Coordinate of the worst probe, for failure messages.
  int layer = -1;
  bool is_bias = false;
  Eigen::Index row = 0;
  Eigen::Index col = 0;
};

// Central differences (perturbation 1e-5) against backward() on `probes`
// random parameter coordinates.
GradCheckReport grad_check(const Network& net, const Eigen::MatrixXd& batch,
                           const Eigen::MatrixXd& target, int probes, Rng& rng);

}  // namespace rl
