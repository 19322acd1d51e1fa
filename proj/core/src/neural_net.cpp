#include "weldnet/neural_net.hpp"

#include <cmath>

#include "weldnet/error.hpp"
#include "weldnet/rng.hpp"

namespace weldnet {
namespace {

void apply_activation(Activation a, Eigen::MatrixXd& m) {
  if (a == Activation::relu) m = m.cwiseMax(0.0);
}

// ReLU'(z) is 1 for z > 0 and 0 otherwise, including z == 0.
Eigen::MatrixXd activation_derivative(Activation a, const Eigen::MatrixXd& z) {
  if (a == Activation::linear) return Eigen::MatrixXd::Ones(z.rows(), z.cols());
  return (z.array() > 0.0).cast<double>().matrix();
}

void check_loss_inputs(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
  if (predicted.size() == 0) {
    throw Error(ErrorCode::invalid_argument, "msle: empty input");
  }
  if (predicted.size() != actual.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                "msle: " + std::to_string(predicted.size()) + " predictions vs " +
                    std::to_string(actual.size()) + " actual values");
  }
  if (!predicted.allFinite() || !actual.allFinite()) {
    throw Error(ErrorCode::non_finite, "msle: non-finite input");
  }
  if ((actual.array() <= -1.0).any()) {
    throw Error(ErrorCode::invalid_argument, "msle: actual values must be greater than -1");
  }
}

}  // namespace

std::string to_string(Activation a) { return a == Activation::relu ? "relu" : "linear"; }

Activation parse_activation(const std::string& text) {
  if (text == "relu") return Activation::relu;
  if (text == "linear") return Activation::linear;
  throw Error(ErrorCode::invalid_argument, "unknown activation '" + text + "'");
}

void NetworkConfig::validate() const {
  if (input_dim < 1) throw Error(ErrorCode::invalid_argument, "input_dim must be at least 1");
  if (layer_widths.empty()) throw Error(ErrorCode::invalid_argument, "network has no layers");
  if (activations.size() != layer_widths.size()) {
    throw Error(ErrorCode::invalid_argument, "need one activation per layer");
  }
  for (std::size_t i = 0; i < layer_widths.size(); ++i) {
    if (layer_widths[i] < 1) {
      throw Error(ErrorCode::invalid_argument, "layer " + std::to_string(i) + " has width 0");
    }
    const bool last = i + 1 == layer_widths.size();
    const Activation expected = last ? Activation::linear : Activation::relu;
    if (activations[i] != expected) {
      throw Error(ErrorCode::invalid_argument,
                  "layer " + std::to_string(i) + " must use " + to_string(expected));
    }
  }
  if (layer_widths.back() != 1) {
    throw Error(ErrorCode::invalid_argument, "output layer must have width 1");
  }
}

NetworkConfig NetworkConfig::regressor(std::size_t input_dim,
                                       const std::vector<std::size_t>& hidden,
                                       std::uint64_t seed) {
  NetworkConfig cfg;
  cfg.input_dim = input_dim;
  cfg.layer_widths = hidden;
  cfg.layer_widths.push_back(1);
  cfg.activations.assign(hidden.size(), Activation::relu);
  cfg.activations.push_back(Activation::linear);
  cfg.seed = seed;
  return cfg;
}

NetworkConfig depth15_preset(std::size_t input_dim, std::uint64_t seed, std::size_t hidden_width) {
  return NetworkConfig::regressor(
      input_dim, std::vector<std::size_t>(kDepthPresetLayers - 1, hidden_width), seed);
}

NetworkConfig pore6_preset(std::size_t input_dim, std::uint64_t seed, std::size_t hidden_width) {
  return NetworkConfig::regressor(
      input_dim, std::vector<std::size_t>(kPorePresetLayers - 1, hidden_width), seed);
}

std::size_t NetworkState::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += static_cast<std::size_t>(l.weights.size() + l.biases.size());
  return n;
}

void NetworkState::validate() const {
  if (layers.empty()) throw Error(ErrorCode::dimension_mismatch, "network has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    if (l.weights.rows() == 0 || l.weights.cols() == 0) {
      throw Error(ErrorCode::dimension_mismatch, "layer " + std::to_string(i) + " is empty");
    }
    if (l.biases.size() != l.weights.rows()) {
      throw Error(ErrorCode::dimension_mismatch,
                  "layer " + std::to_string(i) + ": bias length does not match output width");
    }
    if (i > 0 && l.input_dim() != layers[i - 1].output_dim()) {
      throw Error(ErrorCode::dimension_mismatch,
                  "layer " + std::to_string(i) + " expects " + std::to_string(l.input_dim()) +
                      " inputs but layer " + std::to_string(i - 1) + " produces " +
                      std::to_string(layers[i - 1].output_dim()));
    }
    if (!l.weights.allFinite() || !l.biases.allFinite()) {
      throw Error(ErrorCode::non_finite, "layer " + std::to_string(i) + " has non-finite parameters");
    }
  }
}

NetworkState init_network(const NetworkConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);
  NetworkState net;
  std::size_t fan_in = cfg.input_dim;
  for (std::size_t i = 0; i < cfg.layer_widths.size(); ++i) {
    const std::size_t fan_out = cfg.layer_widths[i];
    const double bound = cfg.activations[i] == Activation::relu
                             ? std::sqrt(6.0 / static_cast<double>(fan_in))
                             : std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    DenseLayer layer;
    layer.activation = cfg.activations[i];
    layer.weights.resize(static_cast<Eigen::Index>(fan_out), static_cast<Eigen::Index>(fan_in));
    // Row-major fill order keeps the draw sequence independent of Eigen storage.
    for (Eigen::Index r = 0; r < layer.weights.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weights.cols(); ++c) {
        layer.weights(r, c) = rng.uniform(-bound, bound);
      }
    }
    layer.biases = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(fan_out));
    net.layers.push_back(std::move(layer));
    fan_in = fan_out;
  }
  return net;
}

ForwardResult forward(const NetworkState& net, const Eigen::MatrixXd& batch) {
  if (net.layers.empty()) throw Error(ErrorCode::dimension_mismatch, "network has no layers");
  if (static_cast<std::size_t>(batch.cols()) != net.input_dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "batch has " + std::to_string(batch.cols()) + " columns, network expects " +
                    std::to_string(net.input_dim()));
  }
  if (net.output_dim() != 1) {
    throw Error(ErrorCode::dimension_mismatch, "network must have a single output unit");
  }
  ForwardResult result;
  auto& cache = result.cache;
  cache.input = batch;
  cache.pre_activations.reserve(net.layers.size());
  cache.post_activations.reserve(net.layers.size());
  const Eigen::MatrixXd* prev = &cache.input;
  for (const auto& layer : net.layers) {
    Eigen::MatrixXd z = *prev * layer.weights.transpose();
    z.rowwise() += layer.biases.transpose();
    Eigen::MatrixXd a = z;
    apply_activation(layer.activation, a);
    cache.pre_activations.push_back(std::move(z));
    cache.post_activations.push_back(std::move(a));
    prev = &cache.post_activations.back();
  }
  result.outputs = cache.post_activations.back().col(0);
  return result;
}

Eigen::VectorXd predict(const NetworkState& net, const Eigen::MatrixXd& batch) {
  if (net.layers.empty()) throw Error(ErrorCode::dimension_mismatch, "network has no layers");
  if (static_cast<std::size_t>(batch.cols()) != net.input_dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "batch has " + std::to_string(batch.cols()) + " columns, network expects " +
                    std::to_string(net.input_dim()));
  }
  if (net.output_dim() != 1) {
    throw Error(ErrorCode::dimension_mismatch, "network must have a single output unit");
  }
  Eigen::MatrixXd a = batch;
  for (const auto& layer : net.layers) {
    Eigen::MatrixXd z = a * layer.weights.transpose();
    z.rowwise() += layer.biases.transpose();
    apply_activation(layer.activation, z);
    a = std::move(z);
  }
  return a.col(0);
}

double msle_loss(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
  check_loss_inputs(predicted, actual);
  const Eigen::ArrayXd diff =
      predicted.array().max(0.0).log1p() - actual.array().log1p();
  return diff.square().mean();
}

Eigen::VectorXd msle_gradient(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
  check_loss_inputs(predicted, actual);
  const double scale = 2.0 / static_cast<double>(predicted.size());
  Eigen::VectorXd grad(predicted.size());
  for (Eigen::Index i = 0; i < predicted.size(); ++i) {
    const double p = predicted[i];
    grad[i] = p < 0.0 ? 0.0 : scale * (std::log1p(p) - std::log1p(actual[i])) / (1.0 + p);
  }
  return grad;
}

GradientSet backward(const NetworkState& net, const ForwardCache& cache,
                     const Eigen::VectorXd& d_outputs) {
  const std::size_t depth = net.layers.size();
  if (cache.pre_activations.size() != depth || cache.post_activations.size() != depth) {
    throw Error(ErrorCode::dimension_mismatch, "cache was not produced by this network");
  }
  if (static_cast<std::size_t>(cache.input.cols()) != net.input_dim()) {
    throw Error(ErrorCode::dimension_mismatch, "cache input width does not match network");
  }
  for (std::size_t i = 0; i < depth; ++i) {
    if (static_cast<std::size_t>(cache.pre_activations[i].cols()) != net.layers[i].output_dim() ||
        cache.pre_activations[i].rows() != cache.input.rows()) {
      throw Error(ErrorCode::dimension_mismatch,
                  "cache layer " + std::to_string(i) + " does not match network");
    }
  }
  if (d_outputs.size() != cache.input.rows()) {
    throw Error(ErrorCode::dimension_mismatch,
                "d_outputs has " + std::to_string(d_outputs.size()) + " entries for a batch of " +
                    std::to_string(cache.input.rows()));
  }

  GradientSet grads;
  grads.layers.resize(depth);
  Eigen::MatrixXd delta = d_outputs;
  delta = delta.cwiseProduct(
      activation_derivative(net.layers[depth - 1].activation, cache.pre_activations[depth - 1]));
  for (std::size_t k = depth; k-- > 0;) {
    const Eigen::MatrixXd& a_prev = k == 0 ? cache.input : cache.post_activations[k - 1];
    grads.layers[k].d_weights.noalias() = delta.transpose() * a_prev;
    grads.layers[k].d_biases = delta.colwise().sum().transpose();
    if (k > 0) {
      Eigen::MatrixXd upstream = delta * net.layers[k].weights;
      delta = upstream.cwiseProduct(
          activation_derivative(net.layers[k - 1].activation, cache.pre_activations[k - 1]));
    }
  }
  return grads;
}

}  // namespace weldnet
