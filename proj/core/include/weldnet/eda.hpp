#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "weldnet/data_pipeline.hpp"

namespace weldnet {

/// Pearson coefficients between named columns. Pairs involving a
/// zero-variance column hold NaN and are listed in `undefined_pairs`.
struct CorrelationMatrix {
  std::vector<std::string> labels;
  Eigen::MatrixXd values;
  std::vector<std::pair<std::size_t, std::size_t>> undefined_pairs;

  bool is_defined(std::size_t i, std::size_t j) const;
};

enum class CorrelationStrength { strong, moderate, weak, undefined };

struct Histogram {
  std::vector<double> bin_edges;  // bins + 1 entries, strictly increasing
  std::vector<std::size_t> counts;
};

struct DistributionSummary {
  std::string column;
  std::size_t count = 0;
  double mean = 0.0;
  double std_dev = 0.0;
  double min = 0.0;
  double max = 0.0;
  double skewness = 0.0;
  Histogram histogram;
};

inline constexpr double kStrongCorrelation = 0.7;
inline constexpr double kWeakCorrelation = 0.4;

/// Population-convention Pearson correlation of two equal-length samples.
/// Returns NaN when either sample is constant.
double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y);

CorrelationMatrix correlation_matrix(const Dataset& ds, const std::vector<std::string>& columns);

/// strong iff |r| > 0.7, weak iff |r| < 0.4, moderate otherwise. NaN maps to
/// undefined; anything else outside [-1, 1] is rejected.
CorrelationStrength classify_strength(double r);
std::string to_string(CorrelationStrength s);

DistributionSummary distribution_summary(const Dataset& ds, const std::string& column,
                                         std::size_t bins);
DistributionSummary distribution_summary(const std::string& name, const Eigen::VectorXd& values,
                                         std::size_t bins);

/// Heatmap data: header row and first column carry labels; undefined cells
/// are written as "NA".
void write_correlation_csv(std::ostream& out, const CorrelationMatrix& corr);

/// One row per summary; bin edges and counts are ';'-joined lists.
void write_distribution_csv(std::ostream& out, const std::vector<DistributionSummary>& summaries);

}  // namespace weldnet
