#include "weldnet/eda.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

#include "weldnet/error.hpp"

namespace weldnet {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool is_constant(const Eigen::VectorXd& v) {
  return v.size() == 0 || v.maxCoeff() == v.minCoeff();
}

std::string format_real(double v) {
  if (std::isnan(v)) return "NA";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace

bool CorrelationMatrix::is_defined(std::size_t i, std::size_t j) const {
  return !std::isnan(values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
}

double pearson(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::dimension_mismatch, "pearson: samples differ in length");
  }
  if (x.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "pearson: need at least 2 rows");
  }
  if (is_constant(x) || is_constant(y)) return kNaN;
  const Eigen::ArrayXd dx = x.array() - x.mean();
  const Eigen::ArrayXd dy = y.array() - y.mean();
  const double sxy = (dx * dy).sum();
  const double sxx = dx.square().sum();
  const double syy = dy.square().sum();
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

CorrelationMatrix correlation_matrix(const Dataset& ds, const std::vector<std::string>& columns) {
  if (ds.rows() < 2) {
    throw Error(ErrorCode::invalid_argument,
                "correlation needs at least 2 rows, got " + std::to_string(ds.rows()));
  }
  std::vector<Eigen::VectorXd> data;
  data.reserve(columns.size());
  for (const auto& name : columns) data.push_back(ds.column(name));

  const auto k = static_cast<Eigen::Index>(columns.size());
  CorrelationMatrix out;
  out.labels = columns;
  out.values = Eigen::MatrixXd::Constant(k, k, kNaN);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = i; j < k; ++j) {
      const double r = i == j ? (is_constant(data[i]) ? kNaN : 1.0) : pearson(data[i], data[j]);
      out.values(i, j) = r;
      out.values(j, i) = r;
      if (std::isnan(r)) {
        out.undefined_pairs.emplace_back(i, j);
        if (i != j) out.undefined_pairs.emplace_back(j, i);
      }
    }
  }
  std::sort(out.undefined_pairs.begin(), out.undefined_pairs.end());
  return out;
}

CorrelationStrength classify_strength(double r) {
  if (std::isnan(r)) return CorrelationStrength::undefined;
  if (r < -1.0 || r > 1.0) {
    throw Error(ErrorCode::invalid_argument,
                "correlation " + format_real(r) + " outside [-1, 1]");
  }
  const double a = std::abs(r);
  if (a > kStrongCorrelation) return CorrelationStrength::strong;
  if (a < kWeakCorrelation) return CorrelationStrength::weak;
  return CorrelationStrength::moderate;
}

std::string to_string(CorrelationStrength s) {
  switch (s) {
    case CorrelationStrength::strong: return "strong";
    case CorrelationStrength::moderate: return "moderate";
    case CorrelationStrength::weak: return "weak";
    case CorrelationStrength::undefined: return "undefined";
  }
  return "undefined";
}

DistributionSummary distribution_summary(const std::string& name, const Eigen::VectorXd& values,
                                         std::size_t bins) {
  if (bins < 1) throw Error(ErrorCode::invalid_argument, "histogram needs at least one bin");
  if (values.size() == 0) {
    throw Error(ErrorCode::empty_selection, "column '" + name + "' is empty");
  }
  DistributionSummary s;
  s.column = name;
  s.count = static_cast<std::size_t>(values.size());
  s.mean = values.mean();
  s.min = values.minCoeff();
  s.max = values.maxCoeff();
  if (s.max != s.min) {
    const Eigen::ArrayXd d = values.array() - s.mean;
    const double n = static_cast<double>(s.count);
    const double m2 = d.square().sum() / n;
    const double m3 = d.cube().sum() / n;
    s.std_dev = std::sqrt(m2);
    s.skewness = m3 / (m2 * s.std_dev);
  }

  // A constant column gets a unit-width span centred on its value.
  const double lo = s.max != s.min ? s.min : s.min - 0.5;
  const double hi = s.max != s.min ? s.max : s.max + 0.5;
  const double width = (hi - lo) / static_cast<double>(bins);
  s.histogram.bin_edges.resize(bins + 1);
  for (std::size_t b = 0; b < bins; ++b) s.histogram.bin_edges[b] = lo + width * static_cast<double>(b);
  s.histogram.bin_edges[bins] = hi;
  s.histogram.counts.assign(bins, 0);
  for (double v : values) {
    auto b = static_cast<std::size_t>((v - lo) / width);
    b = std::min(b, bins - 1);
    // Guard against rounding placing v just past an edge.
    while (b > 0 && v < s.histogram.bin_edges[b]) --b;
    while (b + 1 < bins && v >= s.histogram.bin_edges[b + 1]) ++b;
    ++s.histogram.counts[b];
  }
  return s;
}

DistributionSummary distribution_summary(const Dataset& ds, const std::string& column,
                                         std::size_t bins) {
  return distribution_summary(column, ds.column(column), bins);
}

void write_correlation_csv(std::ostream& out, const CorrelationMatrix& corr) {
  out << "column";
  for (const auto& l : corr.labels) out << ',' << l;
  out << '\n';
  for (std::size_t i = 0; i < corr.labels.size(); ++i) {
    out << corr.labels[i];
    for (std::size_t j = 0; j < corr.labels.size(); ++j) {
      out << ',' << format_real(corr.values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    }
    out << '\n';
  }
}

void write_distribution_csv(std::ostream& out, const std::vector<DistributionSummary>& summaries) {
  out << "column,count,mean,std_dev,min,max,skewness,bin_edges,bin_counts\n";
  for (const auto& s : summaries) {
    out << s.column << ',' << s.count << ',' << format_real(s.mean) << ','
        << format_real(s.std_dev) << ',' << format_real(s.min) << ',' << format_real(s.max)
        << ',' << format_real(s.skewness) << ',';
    for (std::size_t i = 0; i < s.histogram.bin_edges.size(); ++i) {
      if (i) out << ';';
      out << format_real(s.histogram.bin_edges[i]);
    }
    out << ',';
    for (std::size_t i = 0; i < s.histogram.counts.size(); ++i) {
      if (i) out << ';';
      out << s.histogram.counts[i];
    }
    out << '\n';
  }
}

}  // namespace weldnet
