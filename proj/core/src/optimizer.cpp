#include "weldnet/optimizer.hpp"

#include <cmath>
#include <string>

#include "weldnet/error.hpp"

namespace weldnet {

void AdamConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorCode::invalid_argument, "learning rate must be positive");
  }
  if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "beta1 and beta2 must lie in [0, 1)");
  }
  if (!(epsilon > 0.0)) throw Error(ErrorCode::invalid_argument, "epsilon must be positive");
}

AdamState adam_init(const NetworkState& net) {
  AdamState state;
  for (const auto& layer : net.layers) {
    LayerMoments zero{Eigen::MatrixXd::Zero(layer.weights.rows(), layer.weights.cols()),
                      Eigen::VectorXd::Zero(layer.biases.size())};
    state.m.push_back(zero);
    state.v.push_back(std::move(zero));
  }
  return state;
}

void adam_step(NetworkState& net, const GradientSet& grads, AdamState& state,
               const AdamConfig& cfg) {
  cfg.validate();
  const std::size_t depth = net.layers.size();
  if (grads.layers.size() != depth || state.m.size() != depth || state.v.size() != depth) {
    throw Error(ErrorCode::dimension_mismatch, "adam: layer count mismatch");
  }
  for (std::size_t i = 0; i < depth; ++i) {
    const auto& layer = net.layers[i];
    const auto& g = grads.layers[i];
    const bool same = g.d_weights.rows() == layer.weights.rows() &&
                      g.d_weights.cols() == layer.weights.cols() &&
                      g.d_biases.size() == layer.biases.size() &&
                      state.m[i].weights.rows() == layer.weights.rows() &&
                      state.m[i].weights.cols() == layer.weights.cols() &&
                      state.v[i].weights.rows() == layer.weights.rows() &&
                      state.v[i].weights.cols() == layer.weights.cols() &&
                      state.m[i].biases.size() == layer.biases.size() &&
                      state.v[i].biases.size() == layer.biases.size();
    if (!same) {
      throw Error(ErrorCode::dimension_mismatch,
                  "adam: shape mismatch at layer " + std::to_string(i));
    }
    if (!g.d_weights.allFinite() || !g.d_biases.allFinite()) {
      throw Error(ErrorCode::non_finite,
                  "adam: non-finite gradient at layer " + std::to_string(i));
    }
  }

  ++state.t;
  const double t = static_cast<double>(state.t);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);

  auto update = [&](auto& theta, const auto& g, auto& m, auto& v) {
    m = cfg.beta1 * m + (1.0 - cfg.beta1) * g;
    v = cfg.beta2 * v + (1.0 - cfg.beta2) * g.cwiseProduct(g);
    theta.array() -= cfg.learning_rate * (m.array() / correction1) /
                     ((v.array() / correction2).sqrt() + cfg.epsilon);
  };
  for (std::size_t i = 0; i < depth; ++i) {
    update(net.layers[i].weights, grads.layers[i].d_weights, state.m[i].weights,
           state.v[i].weights);
    update(net.layers[i].biases, grads.layers[i].d_biases, state.m[i].biases, state.v[i].biases);
  }
}

}  // namespace weldnet
