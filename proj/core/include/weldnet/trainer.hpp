#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "weldnet/data_pipeline.hpp"
#include "weldnet/neural_net.hpp"
#include "weldnet/optimizer.hpp"

namespace weldnet {

struct TrainingConfig {
  std::size_t epochs = 1000;
  std::size_t batch_size = 32;
  std::uint64_t shuffle_seed = 0;
  AdamConfig adam;

  void validate() const;
};

/// Features plus one target column; the unit a single regressor trains on.
struct RegressionSet {
  Eigen::MatrixXd features;
  Eigen::VectorXd targets;

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
};

/// The given rows of `ds`, paired with target column `target`.
RegressionSet regression_set(const Dataset& ds, std::size_t target,
                             const std::vector<std::size_t>& rows);
RegressionSet regression_set(const Dataset& ds, std::size_t target);

struct EpochRecord {
  std::size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double train_mae = 0.0;
  double val_mae = 0.0;
};

struct LearningCurve {
  std::vector<EpochRecord> records;
  TrainingConfig config;
  std::uint64_t optimizer_steps = 0;
};

enum class UnitSpace { scaled, original };

std::string to_string(UnitSpace space);

struct MetricsReport {
  double msle = 0.0;
  double mae = 0.0;
  double r_squared = 0.0;  // NaN when the actual values are constant
  std::size_t n = 0;
  UnitSpace unit_space = UnitSpace::scaled;
};

/// Mini-batch Adam on the MSLE loss. Each epoch reshuffles the training rows,
/// trains on ceil(n / batch_size) batches (the last may be partial), then
/// records full-pass training and validation loss and MAE.
LearningCurve train(NetworkState& net, const RegressionSet& train_set,
                    const RegressionSet& val_set, const TrainingConfig& cfg);

/// Metrics on a scaled set. In original space predictions and targets are
/// mapped back through `target_range` first.
MetricsReport evaluate(const NetworkState& net, const RegressionSet& data,
                       const std::optional<ColumnRange>& target_range, UnitSpace space);

/// Mean of the last `window` training losses ending at `epoch` (1-based).
double moving_average_train_loss(const LearningCurve& curve, std::size_t epoch,
                                 std::size_t window);

/// Header `epoch,train_loss,val_loss,train_mae,val_mae`; values round-trip.
void write_learning_curve_csv(std::ostream& out, const LearningCurve& curve);

}  // namespace weldnet
