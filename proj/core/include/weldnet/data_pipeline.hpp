#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "weldnet/schema.hpp"

namespace weldnet {

/// A parsed CSV cell: numeric columns hold a real, categorical and group-key
/// columns hold the original text.
using Cell = std::variant<double, std::string>;

struct RawRecord {
  std::vector<Cell> values;
};

/// Table as read from disk, before label encoding.
struct RawDataset {
  FeatureSchema schema;
  std::vector<RawRecord> records;

  std::size_t size() const { return records.size(); }
};

/// Encoded, real-valued table: one row per sample.
struct Dataset {
  FeatureSchema schema;
  Eigen::MatrixXd features;  // rows x input_count
  Eigen::MatrixXd targets;   // rows x target_count
  std::optional<std::vector<std::string>> group_ids;

  std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }

  /// Values of a named input or target column.
  Eigen::VectorXd column(const std::string& name) const;

  Dataset select_rows(std::span<const std::size_t> rows) const;
};

/// Label encoding per categorical input column. Categories are kept sorted so
/// that code k is the k-th category in lexicographic order.
struct EncodingMap {
  std::map<std::string, std::vector<std::string>> categories;

  int encode(const std::string& column, const std::string& value) const;
  const std::string& decode(const std::string& column, int code) const;

  friend bool operator==(const EncodingMap&, const EncodingMap&) = default;
};

struct EncodedDataset {
  Dataset dataset;
  EncodingMap encoding;
};

struct ColumnRange {
  double min = 0.0;
  double max = 0.0;

  /// (v - min) / (max - min); a degenerate range maps everything to 0.
  double scale(double v) const { return max == min ? 0.0 : (v - min) / (max - min); }
  double unscale(double v) const { return v * (max - min) + min; }

  friend bool operator==(const ColumnRange&, const ColumnRange&) = default;
};

/// Min-max scaling parameters for every input and target column.
struct ScalerParams {
  std::vector<ColumnRange> inputs;
  std::vector<ColumnRange> targets;

  friend bool operator==(const ScalerParams&, const ScalerParams&) = default;
};

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
  std::vector<std::size_t> test;
  std::uint64_t seed = 0;
};

/// Reads a comma-separated file whose header must equal the schema's column
/// names in order. Numeric cells are parsed as reals; categorical and
/// group-key cells are kept as text.
RawDataset load_csv(const std::filesystem::path& path, const FeatureSchema& schema);
RawDataset parse_csv(std::istream& in, const FeatureSchema& schema,
                     const std::string& source = "<stream>");

void save_csv(const std::filesystem::path& path, const RawDataset& data);
void write_csv(std::ostream& out, const RawDataset& data);

/// Replaces categorical inputs by integer codes. Without a map, one is fitted
/// from the data; with a map, unknown categories are an error.
EncodedDataset encode_categoricals(const RawDataset& raw,
                                   const std::optional<EncodingMap>& map = std::nullopt);

ScalerParams fit_scaler(const Dataset& ds, std::span<const std::size_t> rows);
Dataset transform(const Dataset& ds, const ScalerParams& scaler);
Dataset inverse_transform(const Dataset& ds, const ScalerParams& scaler);

/// Collapses rows that share a group id into one row holding the mean of each
/// target. Inputs must be identical within a group.
Dataset average_repetitions(const Dataset& ds);

/// Seeded shuffle, then contiguous train/validation/test partition with
/// round-half-up sizes for train and validation.
SplitIndices split_dataset(std::size_t n, const SplitRatios& ratios, std::uint64_t seed);

}  // namespace weldnet
