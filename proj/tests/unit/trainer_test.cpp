#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "weldnet/error.hpp"
#include "weldnet/trainer.hpp"

using namespace weldnet;

namespace {

// y = 0.2 + 0.5 x0 + 0.3 x1 on uniform inputs.
RegressionSet linear_set(std::uint64_t seed, int n) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0, 1);
  RegressionSet s{Eigen::MatrixXd(n, 2), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    s.features(i, 0) = u(gen);
    s.features(i, 1) = u(gen);
    s.targets(i) = 0.2 + 0.5 * s.features(i, 0) + 0.3 * s.features(i, 1);
  }
  return s;
}

NetworkState exact_linear_net() {
  NetworkState net;
  net.layers.push_back({(Eigen::MatrixXd(1, 2) << 0.5, 0.3).finished(), Eigen::VectorXd::Constant(1, 0.2), Activation::linear});
  return net;
}

NetworkState constant_net(double c) {
  NetworkState net;
  net.layers.push_back({Eigen::MatrixXd::Zero(1, 2), Eigen::VectorXd::Constant(1, c), Activation::linear});
  return net;
}

bool same_curve(const LearningCurve& a, const LearningCurve& b) {
  if (a.records.size() != b.records.size()) return false;
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    const auto &x = a.records[i], &y = b.records[i];
    if (x.epoch != y.epoch || x.train_loss != y.train_loss || x.val_loss != y.val_loss ||
        x.train_mae != y.train_mae || x.val_mae != y.val_mae)
      return false;
  }
  return true;
}

}  // namespace

TEST(TrainingConfig, Validation) {
  EXPECT_NO_THROW(TrainingConfig{}.validate());
  EXPECT_THROW((TrainingConfig{0}).validate(), Error);
  EXPECT_THROW((TrainingConfig{10, 0}).validate(), Error);
}

TEST(Train, OneEpochWithLargeBatchTakesOneStep) {
  auto net = init_network(NetworkConfig::regressor(2, {4}, 3));
  TrainingConfig cfg;
  cfg.epochs = 1;
  cfg.batch_size = 64;
  const auto curve = train(net, linear_set(1, 20), linear_set(2, 5), cfg);
  EXPECT_EQ(curve.records.size(), 1u);
  EXPECT_EQ(curve.optimizer_steps, 1u);
  EXPECT_EQ(curve.records[0].epoch, 1u);
}

TEST(Train, PartialFinalBatchIsKept) {
  auto net = init_network(NetworkConfig::regressor(2, {4}, 3));
  TrainingConfig cfg;
  cfg.epochs = 3;
  cfg.batch_size = 32;
  const auto curve = train(net, linear_set(1, 107), linear_set(2, 13), cfg);
  EXPECT_EQ(curve.optimizer_steps, 3u * 4u);
  EXPECT_EQ(curve.records.size(), 3u);
}

TEST(Train, CurveRecordsMatchFullPassMetrics) {
  auto net = init_network(NetworkConfig::regressor(2, {8}, 11));
  const auto tr = linear_set(1, 30), va = linear_set(2, 6);
  TrainingConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 8;
  const auto curve = train(net, tr, va, cfg);
  const auto& last = curve.records.back();
  const auto p_tr = oracle::naive_forward(net, tr.features), p_va = oracle::naive_forward(net, va.features);
  EXPECT_NEAR(last.train_loss, oracle::msle(p_tr, oracle::to_std(tr.targets)), 1e-12);
  EXPECT_NEAR(last.val_loss, oracle::msle(p_va, oracle::to_std(va.targets)), 1e-12);
  EXPECT_NEAR(last.train_mae, oracle::mae(p_tr, oracle::to_std(tr.targets)), 1e-12);
  EXPECT_NEAR(last.val_mae, oracle::mae(p_va, oracle::to_std(va.targets)), 1e-12);
  for (std::size_t i = 0; i < curve.records.size(); ++i) {
    EXPECT_EQ(curve.records[i].epoch, i + 1);
    EXPECT_GE(curve.records[i].train_loss, 0.0);
    EXPECT_GE(curve.records[i].val_loss, 0.0);
  }
}

TEST(Train, ReducesLossOnLearnableData) {
  auto net = init_network(NetworkConfig::regressor(2, {16, 16}, 5));
  TrainingConfig cfg;
  cfg.epochs = 300;
  cfg.batch_size = 16;
  cfg.adam.learning_rate = 0.003;
  cfg.shuffle_seed = 9;
  const auto curve = train(net, linear_set(3, 64), linear_set(4, 16), cfg);
  EXPECT_EQ(curve.records.size(), 300u);
  EXPECT_LT(moving_average_train_loss(curve, 300, 50), moving_average_train_loss(curve, 50, 50));
  EXPECT_LT(curve.records.back().train_loss, 1e-3);
}

TEST(Train, IdenticalSeedsGiveIdenticalCurvesAndParameters) {
  const auto tr = linear_set(5, 40), va = linear_set(6, 8);
  TrainingConfig cfg;
  cfg.epochs = 20;
  cfg.batch_size = 7;
  cfg.shuffle_seed = 99;
  auto a = init_network(NetworkConfig::regressor(2, {6, 6}, 8));
  auto b = init_network(NetworkConfig::regressor(2, {6, 6}, 8));
  const auto ca = train(a, tr, va, cfg), cb = train(b, tr, va, cfg);
  EXPECT_TRUE(same_curve(ca, cb));
  for (std::size_t l = 0; l < a.layers.size(); ++l) EXPECT_EQ(a.layers[l].weights, b.layers[l].weights);

  cfg.shuffle_seed = 100;
  auto c = init_network(NetworkConfig::regressor(2, {6, 6}, 8));
  EXPECT_FALSE(same_curve(ca, train(c, tr, va, cfg)));
}

TEST(Train, ErrorsOnBadInputs) {
  auto net = init_network(NetworkConfig::regressor(3, {4}, 1));
  EXPECT_THROW(train(net, linear_set(1, 10), linear_set(2, 3), {}), Error);
  auto ok = init_network(NetworkConfig::regressor(2, {4}, 1));
  RegressionSet empty{Eigen::MatrixXd(0, 2), Eigen::VectorXd(0)};
  EXPECT_THROW(train(ok, linear_set(1, 10), empty, {}), Error);
  EXPECT_THROW(train(ok, empty, linear_set(1, 10), {}), Error);
}

TEST(Train, NonFiniteOutputsAreReportedWithEpoch) {
  NetworkState net;
  net.layers.push_back({Eigen::MatrixXd::Constant(1, 2, 1e308), Eigen::VectorXd::Constant(1, 1e308), Activation::linear});
  try {
    train(net, linear_set(1, 10), linear_set(2, 3), {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::non_finite);
    EXPECT_NE(std::string(e.what()).find("epoch 1"), std::string::npos) << e.what();
  }
}

TEST(Evaluate, PerfectMeanAndWorseThanMeanPredictors) {
  const auto data = linear_set(7, 25);
  const auto perfect = evaluate(exact_linear_net(), data, std::nullopt, UnitSpace::scaled);
  EXPECT_NEAR(perfect.msle, 0.0, 1e-30);
  EXPECT_NEAR(perfect.mae, 0.0, 1e-15);
  EXPECT_NEAR(perfect.r_squared, 1.0, 1e-15);
  EXPECT_EQ(perfect.n, 25u);

  const double mean = data.targets.mean();
  EXPECT_NEAR(evaluate(constant_net(mean), data, std::nullopt, UnitSpace::scaled).r_squared, 0.0, 1e-12);
  EXPECT_LT(evaluate(constant_net(mean + 0.3), data, std::nullopt, UnitSpace::scaled).r_squared, 0.0);
}

TEST(Evaluate, OriginalUnitsUnscaleBothSides) {
  const auto data = linear_set(8, 12);
  const ColumnRange range{1.0, 4.0};
  const auto net = constant_net(0.5);
  const auto m = evaluate(net, data, range, UnitSpace::original);
  std::vector<double> p(12, range.unscale(0.5)), a;
  for (auto v : data.targets) a.push_back(range.unscale(v));
  EXPECT_EQ(m.unit_space, UnitSpace::original);
  EXPECT_NEAR(m.mae, oracle::mae(p, a), 1e-12);
  EXPECT_NEAR(m.msle, oracle::msle(p, a), 1e-12);
  EXPECT_THROW(evaluate(net, data, std::nullopt, UnitSpace::original), Error);
}

TEST(Evaluate, InvariantToRowOrder) {
  std::mt19937_64 gen(4);
  const auto net = init_network(NetworkConfig::regressor(2, {5}, 2));
  const auto data = linear_set(9, 30);
  std::vector<std::size_t> order(30);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), gen);
  RegressionSet shuffled{Eigen::MatrixXd(30, 2), Eigen::VectorXd(30)};
  for (int i = 0; i < 30; ++i) {
    shuffled.features.row(i) = data.features.row(order[i]);
    shuffled.targets(i) = data.targets(order[i]);
  }
  const auto a = evaluate(net, data, std::nullopt, UnitSpace::scaled);
  const auto b = evaluate(net, shuffled, std::nullopt, UnitSpace::scaled);
  EXPECT_NEAR(a.msle, b.msle, 1e-14);
  EXPECT_NEAR(a.mae, b.mae, 1e-14);
  EXPECT_NEAR(a.r_squared, b.r_squared, 1e-12);
}

TEST(Evaluate, ConstantTargetsGiveUndefinedRSquared) {
  RegressionSet flat{Eigen::MatrixXd::Random(4, 2), Eigen::VectorXd::Constant(4, 0.3)};
  EXPECT_TRUE(std::isnan(evaluate(constant_net(0.3), flat, std::nullopt, UnitSpace::scaled).r_squared));
  RegressionSet empty{Eigen::MatrixXd(0, 2), Eigen::VectorXd(0)};
  EXPECT_THROW(evaluate(constant_net(0.3), empty, std::nullopt, UnitSpace::scaled), Error);
}

TEST(LearningCurve, MovingAverageAndCsv) {
  LearningCurve curve;
  for (std::size_t e = 1; e <= 4; ++e) curve.records.push_back({e, double(e), 0.5, 0.25, 1.0 / 3.0});
  EXPECT_DOUBLE_EQ(moving_average_train_loss(curve, 4, 2), 3.5);
  EXPECT_DOUBLE_EQ(moving_average_train_loss(curve, 2, 2), 1.5);
  EXPECT_DOUBLE_EQ(moving_average_train_loss(curve, 1, 2), 1.0);
  EXPECT_THROW(moving_average_train_loss(curve, 0, 2), Error);
  EXPECT_THROW(moving_average_train_loss(curve, 5, 1), Error);

  std::ostringstream out;
  write_learning_curve_csv(out, curve);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "epoch,train_loss,val_loss,train_mae,val_mae");
  std::getline(in, line);
  EXPECT_EQ(line.substr(0, 8), "1,1,0.5,");
  const auto last = line.substr(line.rfind(',') + 1);
  EXPECT_EQ(std::stod(last), 1.0 / 3.0);
}

TEST(RegressionSet, SelectsRowsAndTarget) {
  Dataset ds{FeatureSchema({{"x", ColumnKind::numeric, ColumnRole::input, std::nullopt},
                            {"a", ColumnKind::numeric, ColumnRole::target, std::nullopt},
                            {"b", ColumnKind::numeric, ColumnRole::target, std::nullopt}}),
             (Eigen::MatrixXd(3, 1) << 1, 2, 3).finished(),
             (Eigen::MatrixXd(3, 2) << 10, 20, 11, 21, 12, 22).finished(), std::nullopt};
  const auto s = regression_set(ds, 1, {2, 0});
  EXPECT_EQ(s.size(), 2u);
  EXPECT_EQ(s.features(0, 0), 3.0);
  EXPECT_EQ(s.targets(1), 20.0);
  EXPECT_EQ(regression_set(ds, 0).size(), 3u);
  EXPECT_THROW(regression_set(ds, 2), Error);
}
