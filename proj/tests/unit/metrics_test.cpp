#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "weldnet/error.hpp"
#include "weldnet/metrics.hpp"

using namespace weldnet;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

}  // namespace

TEST(Mae, HandExamples) {
  EXPECT_EQ(mae(vec({1, 2}), vec({1, 2})), 0.0);
  EXPECT_EQ(mae(vec({1, 3}), vec({2, 2})), 1.0);
  EXPECT_EQ(mae(vec({0.1, 7}), vec({2, -3})), mae(vec({2, -3}), vec({0.1, 7})));
  EXPECT_THROW(mae(vec({1}), vec({1, 2})), Error);
  EXPECT_THROW(mae(Eigen::VectorXd(), Eigen::VectorXd()), Error);
}

TEST(RSquared, HandExamples) {
  EXPECT_EQ(r_squared(vec({0, 1, 2}), vec({0, 1, 2})), 1.0);
  EXPECT_EQ(r_squared(vec({1, 1, 1}), vec({0, 1, 2})), 0.0);
  EXPECT_DOUBLE_EQ(r_squared(vec({0, 0, 0}), vec({0, 1, 2})), -1.5);
  EXPECT_THROW(r_squared(vec({1, 2}), vec({3, 3})), Error);
  EXPECT_THROW(r_squared(vec({1}), vec({1})), Error);
  EXPECT_THROW(r_squared(vec({1, 2}), vec({1, 2, 3})), Error);
}

TEST(Metrics, MatchBruteForceOnRandomVectors) {
  std::mt19937_64 gen(1234);
  std::uniform_int_distribution<int> len(2, 64);
  std::uniform_real_distribution<double> u(0, 5);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = len(gen);
    Eigen::VectorXd p(n), a(n);
    for (int i = 0; i < n; ++i) {
      p(i) = u(gen);
      a(i) = u(gen);
    }
    const auto ps = oracle::to_std(p), as = oracle::to_std(a);
    EXPECT_NEAR(mae(p, a), oracle::mae(ps, as), 1e-12);
    EXPECT_NEAR(r_squared(p, a), oracle::r_squared(ps, as), 1e-12);
  }
}
