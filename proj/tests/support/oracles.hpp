#pragma once

// Reference implementations used as independent oracles. Plain loops only, no
// Eigen expression templates, so they share no code paths with the library.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "weldnet/neural_net.hpp"

namespace oracle {

inline std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

inline double msle(const std::vector<double>& p, const std::vector<double>& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double clamped = p[i] < 0.0 ? 0.0 : p[i];
    const double d = std::log(1.0 + clamped) - std::log(1.0 + a[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(p.size());
}

inline double mae(const std::vector<double>& p, const std::vector<double>& a) {
  double sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) sum += std::fabs(p[i] - a[i]);
  return sum / static_cast<double>(p.size());
}

inline double r_squared(const std::vector<double>& p, const std::vector<double>& a) {
  double mean = 0.0;
  for (double v : a) mean += v;
  mean /= static_cast<double>(a.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ss_res += (a[i] - p[i]) * (a[i] - p[i]);
    ss_tot += (a[i] - mean) * (a[i] - mean);
  }
  return 1.0 - ss_res / ss_tot;
}

// Textbook two-pass Pearson coefficient.
inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

// Scalar-loop forward pass: one sample at a time, neuron by neuron.
inline std::vector<double> naive_forward(const weldnet::NetworkState& net,
                                   const Eigen::MatrixXd& batch) {
  std::vector<double> out;
  for (Eigen::Index r = 0; r < batch.rows(); ++r) {
    std::vector<double> a(static_cast<std::size_t>(batch.cols()));
    for (Eigen::Index c = 0; c < batch.cols(); ++c) a[c] = batch(r, c);
    for (const auto& layer : net.layers) {
      std::vector<double> z(layer.output_dim());
      for (std::size_t o = 0; o < layer.output_dim(); ++o) {
        double s = layer.biases(o);
        for (std::size_t i = 0; i < layer.input_dim(); ++i) s += layer.weights(o, i) * a[i];
        z[o] = layer.activation == weldnet::Activation::relu ? std::max(s, 0.0) : s;
      }
      a = std::move(z);
    }
    out.push_back(a[0]);
  }
  return out;
}

// Visits every scalar parameter of a network in a fixed order.
inline void for_each_parameter(weldnet::NetworkState& net,
                               const std::function<void(std::size_t, std::size_t, double&)>& fn) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto& layer = net.layers[l];
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) fn(l, static_cast<std::size_t>(i), layer.weights.data()[i]);
    for (Eigen::Index i = 0; i < layer.biases.size(); ++i)
      fn(l, static_cast<std::size_t>(layer.weights.size() + i), layer.biases.data()[i]);
  }
}

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t parameters = 0;
};

// Compares analytic gradients of msle(forward(x), y) against central finite
// differences of the naive forward pass. Relative error is
// |a - n| / max(|a|, |n|, floor).
inline GradCheckResult gradient_check(const weldnet::NetworkState& net, const Eigen::MatrixXd& x,
                                      const Eigen::VectorXd& y, double step = 1e-5,
                                      double floor = 1e-8) {
  const auto fr = weldnet::forward(net, x);
  const auto grads =
      weldnet::backward(net, fr.cache, weldnet::msle_gradient(fr.outputs, y));
  const auto target = to_std(y);

  std::vector<double> analytic;
  for (const auto& g : grads.layers) {
    analytic.insert(analytic.end(), g.d_weights.data(), g.d_weights.data() + g.d_weights.size());
    analytic.insert(analytic.end(), g.d_biases.data(), g.d_biases.data() + g.d_biases.size());
  }

  GradCheckResult result;
  auto probe = net;
  std::size_t k = 0;
  for_each_parameter(probe, [&](std::size_t, std::size_t, double& p) {
    const double saved = p;
    p = saved + step;
    const double up = msle(naive_forward(probe, x), target);
    p = saved - step;
    const double down = msle(naive_forward(probe, x), target);
    p = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double a = analytic[k++];
    const double denom = std::max({std::fabs(a), std::fabs(numeric), floor});
    result.max_relative_error = std::max(result.max_relative_error, std::fabs(a - numeric) / denom);
  });
  result.parameters = k;
  return result;
}

// Random small regressor whose outputs on [0, 1) inputs stay positive, so the
// loss is differentiable at every probed point.
inline weldnet::NetworkState random_positive_network(std::mt19937_64& gen, std::size_t max_layers = 3,
                                                     std::size_t max_width = 5) {
  std::uniform_int_distribution<std::size_t> layers(1, max_layers), width(1, max_width);
  std::uniform_real_distribution<double> w(-1.0, 1.0), b(-0.2, 0.2);
  const std::size_t input_dim = width(gen);
  std::vector<std::size_t> hidden(layers(gen) - 1);
  for (auto& h : hidden) h = width(gen);
  auto net = weldnet::init_network(weldnet::NetworkConfig::regressor(input_dim, hidden, gen()));
  for (auto& layer : net.layers) {
    for (Eigen::Index i = 0; i < layer.weights.size(); ++i) layer.weights.data()[i] = w(gen);
    for (Eigen::Index i = 0; i < layer.biases.size(); ++i) layer.biases(i) = b(gen);
  }
  // Positive output weights plus a bias well above the reachable negative
  // range keep every prediction strictly positive.
  auto& out = net.layers.back();
  out.weights = out.weights.cwiseAbs();
  out.biases(0) = 1.0;
  return net;
}

// Unique scratch directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("weldnet-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace oracle
