#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace weldnet {

enum class Activation { relu, linear };

std::string to_string(Activation a);
Activation parse_activation(const std::string& text);

/// Architecture of a single-output regressor: ReLU hidden layers followed by
/// one linear output unit.
struct NetworkConfig {
  std::size_t input_dim = 0;
  std::vector<std::size_t> layer_widths;  // hidden widths, then 1
  std::vector<Activation> activations;    // one per layer
  std::uint64_t seed = 0;

  /// Throws unless the config describes ReLU hidden layers and a single
  /// linear output.
  void validate() const;

  /// ReLU hidden layers of the given widths plus the linear output unit.
  static NetworkConfig regressor(std::size_t input_dim, const std::vector<std::size_t>& hidden,
                                 std::uint64_t seed);
};

inline constexpr std::size_t kDefaultHiddenWidth = 64;
inline constexpr std::size_t kDepthPresetLayers = 15;
inline constexpr std::size_t kPorePresetLayers = 6;

/// 15 dense layers: 14 hidden + output.
NetworkConfig depth15_preset(std::size_t input_dim, std::uint64_t seed,
                             std::size_t hidden_width = kDefaultHiddenWidth);
/// 6 dense layers: 5 hidden + output.
NetworkConfig pore6_preset(std::size_t input_dim, std::uint64_t seed,
                           std::size_t hidden_width = kDefaultHiddenWidth);

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd biases;   // out
  Activation activation = Activation::linear;

  std::size_t input_dim() const { return static_cast<std::size_t>(weights.cols()); }
  std::size_t output_dim() const { return static_cast<std::size_t>(weights.rows()); }
};

struct NetworkState {
  std::vector<DenseLayer> layers;

  std::size_t input_dim() const { return layers.empty() ? 0 : layers.front().input_dim(); }
  std::size_t output_dim() const { return layers.empty() ? 0 : layers.back().output_dim(); }
  std::size_t parameter_count() const;

  /// Checks the dimension chain and parameter finiteness.
  void validate() const;
};

struct LayerGradient {
  Eigen::MatrixXd d_weights;
  Eigen::VectorXd d_biases;
};

struct GradientSet {
  std::vector<LayerGradient> layers;
};

/// Everything backward() needs from a forward pass. Rows are samples.
struct ForwardCache {
  Eigen::MatrixXd input;
  std::vector<Eigen::MatrixXd> pre_activations;   // z, n x out per layer
  std::vector<Eigen::MatrixXd> post_activations;  // a, n x out per layer
};

struct ForwardResult {
  Eigen::VectorXd outputs;
  ForwardCache cache;
};

/// He-uniform weights for ReLU layers, Glorot-uniform for linear layers,
/// zero biases. Deterministic in cfg.seed.
NetworkState init_network(const NetworkConfig& cfg);

ForwardResult forward(const NetworkState& net, const Eigen::MatrixXd& batch);

/// Raw linear outputs, no cache.
Eigen::VectorXd predict(const NetworkState& net, const Eigen::MatrixXd& batch);

/// Mean squared log error with predictions clamped at 0 before the log.
/// Actual values must exceed -1.
double msle_loss(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual);

/// d(msle_loss)/d(predicted); zero wherever the raw prediction was clamped.
Eigen::VectorXd msle_gradient(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual);

/// Reverse-mode pass. d_outputs already carries any 1/n averaging.
GradientSet backward(const NetworkState& net, const ForwardCache& cache,
                     const Eigen::VectorXd& d_outputs);

}  // namespace weldnet
