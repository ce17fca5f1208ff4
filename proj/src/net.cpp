#include "rl/net.hpp"

#include <cmath>
#include <stdexcept>

namespace rl {

namespace {

struct ForwardCache {
  std::vector<Eigen::MatrixXd> activations;  // activations[0] = input batch
  std::vector<Eigen::MatrixXd> pre_activations;
};

ForwardCache forward_cached(const Network& net, const Eigen::MatrixXd& batch) {
  if (batch.cols() != net.input_size()) {
    throw std::invalid_argument("forward: batch width mismatch");
  }
  ForwardCache cache;
  cache.activations.reserve(net.layers.size() + 1);
  cache.pre_activations.reserve(net.layers.size());
  cache.activations.push_back(batch);
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const DenseLayer& l = net.layers[i];
    Eigen::MatrixXd z =
        (cache.activations.back() * l.weight).rowwise() + l.bias;
    cache.pre_activations.push_back(z);
    if (i + 1 < net.layers.size()) z = z.cwiseMax(0.0);
    cache.activations.push_back(std::move(z));
  }
  return cache;
}

void check_target_shape(const Network& net, const Eigen::MatrixXd& batch,
                        const Eigen::MatrixXd& target) {
  if (target.rows() != batch.rows() || target.cols() != net.output_size()) {
    throw std::invalid_argument("target shape mismatch");
  }
}

}  // namespace

Network init_network(const std::vector<int>& layer_sizes, Rng& rng) {
  if (layer_sizes.size() < 2) {
    throw std::invalid_argument("need at least input and output sizes");
  }
  for (int s : layer_sizes) {
    if (s <= 0) throw std::invalid_argument("layer sizes must be positive");
  }
  Network net;
  net.layers.reserve(layer_sizes.size() - 1);
  for (std::size_t i = 0; i + 1 < layer_sizes.size(); ++i) {
    const int fan_in = layer_sizes[i];
    const int fan_out = layer_sizes[i + 1];
    const double limit = std::sqrt(6.0 / fan_in);
    DenseLayer l;
    l.weight.resize(fan_in, fan_out);
    for (int r = 0; r < fan_in; ++r) {
      for (int c = 0; c < fan_out; ++c) {
        l.weight(r, c) = rng.uniform(-limit, limit);
      }
    }
    l.bias = Eigen::RowVectorXd::Zero(fan_out);
    net.layers.push_back(std::move(l));
  }
  return net;
}

Eigen::MatrixXd forward(const Network& net, const Eigen::MatrixXd& batch) {
  if (batch.cols() != net.input_size()) {
    throw std::invalid_argument("forward: batch width mismatch");
  }
  Eigen::MatrixXd a = batch;
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    const DenseLayer& l = net.layers[i];
    a = (a * l.weight).rowwise() + l.bias;
    if (i + 1 < net.layers.size()) a = a.cwiseMax(0.0);
  }
  return a;
}

double mse_loss(const Eigen::MatrixXd& pred, const Eigen::MatrixXd& target) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw std::invalid_argument("mse_loss: shape mismatch");
  }
  return (pred - target).squaredNorm() /
         static_cast<double>(pred.size());
}

Gradients backward(const Network& net, const Eigen::MatrixXd& batch,
                   const Eigen::MatrixXd& target) {
  check_target_shape(net, batch, target);
  const ForwardCache cache = forward_cached(net, batch);
  const auto layer_count = static_cast<std::ptrdiff_t>(net.layers.size());

  Gradients grads;
  grads.layers.resize(net.layers.size());

  Eigen::MatrixXd delta =
      (2.0 / static_cast<double>(target.size())) *
      (cache.activations.back() - target);
  for (std::ptrdiff_t i = layer_count - 1; i >= 0; --i) {
    grads.layers[i].weight = cache.activations[i].transpose() * delta;
    grads.layers[i].bias = delta.colwise().sum();
    if (i > 0) {
      delta = (delta * net.layers[i].weight.transpose()).array() *
              (cache.pre_activations[i - 1].array() > 0.0).cast<double>();
    }
  }
  return grads;
}

AdamState make_adam(const Network& net, double learning_rate) {
  AdamState state;
  state.learning_rate = learning_rate;
  state.m.resize(net.layers.size());
  state.v.resize(net.layers.size());
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    state.m[i].weight = Eigen::MatrixXd::Zero(net.layers[i].weight.rows(),
                                              net.layers[i].weight.cols());
    state.m[i].bias = Eigen::RowVectorXd::Zero(net.layers[i].bias.size());
    state.v[i] = state.m[i];
  }
  return state;
}

void adam_step(Network& net, const Gradients& grads, AdamState& state) {
  if (grads.layers.size() != net.layers.size() ||
      state.m.size() != net.layers.size()) {
    throw std::invalid_argument("adam_step: layer count mismatch");
  }
  state.t += 1;
  const double correction1 = 1.0 - std::pow(state.beta1, state.t);
  const double correction2 = 1.0 - std::pow(state.beta2, state.t);
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    auto update = [&](auto& param, const auto& grad, auto& m, auto& v) {
      if (grad.rows() != param.rows() || grad.cols() != param.cols()) {
        throw std::invalid_argument("adam_step: gradient shape mismatch");
      }
      m = state.beta1 * m + (1.0 - state.beta1) * grad;
      v = state.beta2 * v + (1.0 - state.beta2) * grad.cwiseProduct(grad);
      param.array() -= state.learning_rate * (m.array() / correction1) /
                       ((v.array() / correction2).sqrt() + state.epsilon);
    };
    update(net.layers[i].weight, grads.layers[i].weight, state.m[i].weight,
           state.v[i].weight);
    update(net.layers[i].bias, grads.layers[i].bias, state.m[i].bias,
           state.v[i].bias);
  }
}

GradCheckReport grad_check(const Network& net, const Eigen::MatrixXd& batch,
                           const Eigen::MatrixXd& target, int probes,
                           Rng& rng) {
  check_target_shape(net, batch, target);
  if (probes < 1) throw std::invalid_argument("probes must be >= 1");
  const Gradients analytic = backward(net, batch, target);
  Network work = net;
  constexpr double kStep = 1e-5;
  constexpr double kKink = 1e-6;

  GradCheckReport report;
  for (int p = 0; p < probes; ++p) {
    const auto layer = static_cast<std::size_t>(
        rng.uniform_int(static_cast<std::uint64_t>(net.layers.size())));
    DenseLayer& l = work.layers[layer];
    const bool is_bias =
        rng.uniform_int(static_cast<std::uint64_t>(
            l.weight.size() + l.bias.size())) >=
        static_cast<std::uint64_t>(l.weight.size());
    Eigen::Index row = 0;
    Eigen::Index col = 0;
    double* coord = nullptr;
    if (is_bias) {
      col = static_cast<Eigen::Index>(
          rng.uniform_int(static_cast<std::uint64_t>(l.bias.size())));
      coord = &l.bias(col);
    } else {
      row = static_cast<Eigen::Index>(
          rng.uniform_int(static_cast<std::uint64_t>(l.weight.rows())));
      col = static_cast<Eigen::Index>(
          rng.uniform_int(static_cast<std::uint64_t>(l.weight.cols())));
      coord = &l.weight(row, col);
    }

    const double saved = *coord;
    *coord = saved + kStep;
    const ForwardCache plus = forward_cached(work, batch);
    *coord = saved - kStep;
    const ForwardCache minus = forward_cached(work, batch);
    *coord = saved;

    bool near_kink = false;
    for (std::size_t i = 0; i + 1 < work.layers.size() && !near_kink; ++i) {
      near_kink = plus.pre_activations[i].cwiseAbs().minCoeff() < kKink ||
                  minus.pre_activations[i].cwiseAbs().minCoeff() < kKink;
    }
    if (near_kink) {
      ++report.probes_skipped;
      continue;
    }

    const double loss_plus = mse_loss(plus.activations.back(), target);
    const double loss_minus = mse_loss(minus.activations.back(), target);
    const double numeric = (loss_plus - loss_minus) / (2.0 * kStep);
    const double exact = is_bias ? analytic.layers[layer].bias(col)
                                 : analytic.layers[layer].weight(row, col);
    const double rel = std::abs(numeric - exact) /
                       std::max({std::abs(numeric), std::abs(exact), 1e-8});
    ++report.probes_evaluated;
    if (rel > report.max_rel_error) {
      report.max_rel_error = rel;
      report.layer = static_cast<int>(layer);
      report.is_bias = is_bias;
      report.row = row;
      report.col = col;
    }
  }
  return report;
}

}  // namespace rl
