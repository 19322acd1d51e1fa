#include "weldnet/trainer.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>

#include "weldnet/error.hpp"
#include "weldnet/metrics.hpp"
#include "weldnet/rng.hpp"

namespace weldnet {
namespace {

void check_set(const NetworkState& net, const RegressionSet& set, const char* what) {
  if (static_cast<std::size_t>(set.features.cols()) != net.input_dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + " set has " + std::to_string(set.features.cols()) +
                    " features, network expects " + std::to_string(net.input_dim()));
  }
  if (set.targets.size() != set.features.rows()) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + " set has mismatched feature and target rows");
  }
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

void TrainingConfig::validate() const {
  if (epochs < 1) throw Error(ErrorCode::invalid_argument, "epochs must be at least 1");
  if (batch_size < 1) throw Error(ErrorCode::invalid_argument, "batch_size must be at least 1");
  adam.validate();
}

RegressionSet regression_set(const Dataset& ds, std::size_t target,
                             const std::vector<std::size_t>& rows) {
  if (target >= static_cast<std::size_t>(ds.targets.cols())) {
    throw Error(ErrorCode::column_mismatch, "target index " + std::to_string(target) +
                                                " out of range");
  }
  RegressionSet set;
  set.features.resize(static_cast<Eigen::Index>(rows.size()), ds.features.cols());
  set.targets.resize(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i] >= ds.rows()) {
      throw Error(ErrorCode::invalid_argument,
                  "row index " + std::to_string(rows[i]) + " out of range");
    }
    const auto r = static_cast<Eigen::Index>(rows[i]);
    set.features.row(static_cast<Eigen::Index>(i)) = ds.features.row(r);
    set.targets[static_cast<Eigen::Index>(i)] = ds.targets(r, static_cast<Eigen::Index>(target));
  }
  return set;
}

RegressionSet regression_set(const Dataset& ds, std::size_t target) {
  std::vector<std::size_t> rows(ds.rows());
  std::iota(rows.begin(), rows.end(), std::size_t{0});
  return regression_set(ds, target, rows);
}

std::string to_string(UnitSpace space) {
  return space == UnitSpace::scaled ? "scaled" : "original";
}

LearningCurve train(NetworkState& net, const RegressionSet& train_set,
                    const RegressionSet& val_set, const TrainingConfig& cfg) {
  cfg.validate();
  net.validate();
  check_set(net, train_set, "training");
  check_set(net, val_set, "validation");
  if (train_set.size() == 0) throw Error(ErrorCode::empty_selection, "training set is empty");
  if (val_set.size() == 0) throw Error(ErrorCode::empty_selection, "validation set is empty");

  LearningCurve curve;
  curve.config = cfg;
  curve.records.reserve(cfg.epochs);

  AdamState adam = adam_init(net);
  Rng rng(cfg.shuffle_seed);
  const std::size_t n = train_set.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  Eigen::MatrixXd batch_x;
  Eigen::VectorXd batch_y;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += cfg.batch_size, ++batch_index) {
      const std::size_t len = std::min(cfg.batch_size, n - start);
      batch_x.resize(static_cast<Eigen::Index>(len), train_set.features.cols());
      batch_y.resize(static_cast<Eigen::Index>(len));
      for (std::size_t i = 0; i < len; ++i) {
        const auto src = static_cast<Eigen::Index>(order[start + i]);
        batch_x.row(static_cast<Eigen::Index>(i)) = train_set.features.row(src);
        batch_y[static_cast<Eigen::Index>(i)] = train_set.targets[src];
      }
      auto fwd = forward(net, batch_x);
      if (!fwd.outputs.allFinite()) {
        throw Error(ErrorCode::non_finite, "non-finite loss at epoch " + std::to_string(epoch) +
                                               ", batch " + std::to_string(batch_index));
      }
      const Eigen::VectorXd d_out = msle_gradient(fwd.outputs, batch_y);
      const GradientSet grads = backward(net, fwd.cache, d_out);
      adam_step(net, grads, adam, cfg.adam);
      ++curve.optimizer_steps;
    }

    const Eigen::VectorXd train_pred = predict(net, train_set.features);
    const Eigen::VectorXd val_pred = predict(net, val_set.features);
    if (!train_pred.allFinite() || !val_pred.allFinite()) {
      throw Error(ErrorCode::non_finite,
                  "non-finite loss at epoch " + std::to_string(epoch) + " (end-of-epoch pass)");
    }
    EpochRecord rec;
    rec.epoch = epoch;
    rec.train_loss = msle_loss(train_pred, train_set.targets);
    rec.val_loss = msle_loss(val_pred, val_set.targets);
    rec.train_mae = mae(train_pred, train_set.targets);
    rec.val_mae = mae(val_pred, val_set.targets);
    curve.records.push_back(rec);
  }
  return curve;
}

MetricsReport evaluate(const NetworkState& net, const RegressionSet& data,
                       const std::optional<ColumnRange>& target_range, UnitSpace space) {
  if (data.size() == 0) throw Error(ErrorCode::empty_selection, "cannot evaluate on zero rows");
  check_set(net, data, "evaluation");
  Eigen::VectorXd predicted = predict(net, data.features);
  Eigen::VectorXd actual = data.targets;
  if (space == UnitSpace::original) {
    if (!target_range) {
      throw Error(ErrorCode::invalid_argument, "original-unit metrics need the target scaler");
    }
    predicted = predicted.unaryExpr([&](double v) { return target_range->unscale(v); });
    actual = actual.unaryExpr([&](double v) { return target_range->unscale(v); });
  }
  MetricsReport report;
  report.n = data.size();
  report.unit_space = space;
  report.msle = msle_loss(predicted, actual);
  report.mae = mae(predicted, actual);
  const bool has_spread = actual.size() >= 2 && actual.maxCoeff() != actual.minCoeff();
  report.r_squared =
      has_spread ? r_squared(predicted, actual) : std::numeric_limits<double>::quiet_NaN();
  return report;
}

double moving_average_train_loss(const LearningCurve& curve, std::size_t epoch,
                                 std::size_t window) {
  if (epoch < 1 || epoch > curve.records.size() || window < 1) {
    throw Error(ErrorCode::invalid_argument, "moving average outside the learning curve");
  }
  const std::size_t first = epoch >= window ? epoch - window : 0;
  double sum = 0.0;
  for (std::size_t i = first; i < epoch; ++i) sum += curve.records[i].train_loss;
  return sum / static_cast<double>(epoch - first);
}

void write_learning_curve_csv(std::ostream& out, const LearningCurve& curve) {
  out << "epoch,train_loss,val_loss,train_mae,val_mae\n";
  for (const auto& r : curve.records) {
    out << r.epoch << ',' << format_real(r.train_loss) << ',' << format_real(r.val_loss) << ','
        << format_real(r.train_mae) << ',' << format_real(r.val_mae) << '\n';
  }
}

}  // namespace weldnet
