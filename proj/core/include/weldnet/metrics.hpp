#pragma once

#include <Eigen/Core>

namespace weldnet {

/// (1/n) * sum |p - a|.
double mae(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual);

/// 1 - SS_res / SS_tot. Throws when `actual` is constant or shorter than 2.
double r_squared(const Eigen::VectorXd& predicted, const Eigen::VectorXd& actual);

}  // namespace weldnet
