#include "weldnet/metrics.hpp"

#include <string>

#include "weldnet/error.hpp"

namespace weldnet {
namespace {

void check_lengths(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual,
                   const char* what) {
  if (predicted.size() != actual.size()) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(what) + ": " + std::to_string(predicted.size()) +
                    " predictions vs " + std::to_string(actual.size()) + " actual values");
  }
}

}  // namespace

double mae(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
  check_lengths(predicted, actual, "mae");
  if (predicted.size() == 0) throw Error(ErrorCode::invalid_argument, "mae: empty input");
  return (predicted - actual).cwiseAbs().mean();
}

double r_squared(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual) {
  check_lengths(predicted, actual, "r_squared");
  if (actual.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "r_squared: need at least 2 samples");
  }
  const double mean = actual.mean();
  const double ss_tot = (actual.array() - mean).square().sum();
  if (ss_tot == 0.0) {
    throw Error(ErrorCode::invalid_argument, "r_squared: actual values are constant");
  }
  const double ss_res = (actual - predicted).squaredNorm();
  return 1.0 - ss_res / ss_tot;
}

}  // namespace weldnet
