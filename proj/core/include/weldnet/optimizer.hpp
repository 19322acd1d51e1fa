#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "weldnet/neural_net.hpp"

namespace weldnet {

struct AdamConfig {
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;

  void validate() const;
};

struct LayerMoments {
  Eigen::MatrixXd weights;
  Eigen::VectorXd biases;
};

struct AdamState {
  std::vector<LayerMoments> m;  // first moments
  std::vector<LayerMoments> v;  // second moments
  std::uint64_t t = 0;
};

AdamState adam_init(const NetworkState& net);

/// One bias-corrected Adam update of every parameter:
///   m <- b1 m + (1 - b1) g,  v <- b2 v + (1 - b2) g^2,
///   theta <- theta - lr * m_hat / (sqrt(v_hat) + eps).
/// Inputs are validated before anything is modified.
void adam_step(NetworkState& net, const GradientSet& grads, AdamState& state,
               const AdamConfig& cfg);

}  // namespace weldnet
