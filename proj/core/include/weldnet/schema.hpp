#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace weldnet {

enum class ColumnKind { numeric, categorical };
enum class ColumnRole { input, target, group_key };

struct ColumnSpec {
  std::string name;
  ColumnKind kind = ColumnKind::numeric;
  ColumnRole role = ColumnRole::input;
  std::optional<std::string> unit;

  friend bool operator==(const ColumnSpec&, const ColumnSpec&) = default;
};

/// Ordered column layout of a KIC/KPC table.
///
/// Invariants (checked by the constructor): names are unique and non-empty,
/// there are one or two target columns, at most one group-key column, and
/// target/group-key columns are not categorical unless they are group keys.
class FeatureSchema {
 public:
  FeatureSchema() = default;
  explicit FeatureSchema(std::vector<ColumnSpec> columns);

  const std::vector<ColumnSpec>& columns() const { return columns_; }
  std::size_t column_count() const { return columns_.size(); }
  std::size_t input_count() const { return input_columns_.size(); }
  std::size_t target_count() const { return target_columns_.size(); }

  /// Positions (into columns()) of the input, target and group-key columns.
  const std::vector<std::size_t>& input_columns() const { return input_columns_; }
  const std::vector<std::size_t>& target_columns() const { return target_columns_; }
  std::optional<std::size_t> group_column() const { return group_column_; }

  std::vector<std::string> input_names() const;
  std::vector<std::string> target_names() const;
  std::vector<std::string> column_names() const;

  std::optional<std::size_t> find(const std::string& name) const;
  /// Index of `name` among the input columns, if it is an input.
  std::optional<std::size_t> input_index(const std::string& name) const;
  std::optional<std::size_t> target_index(const std::string& name) const;

  friend bool operator==(const FeatureSchema& a, const FeatureSchema& b) {
    return a.columns_ == b.columns_;
  }

 private:
  std::vector<ColumnSpec> columns_;
  std::vector<std::size_t> input_columns_;
  std::vector<std::size_t> target_columns_;
  std::optional<std::size_t> group_column_;
};

std::string to_string(ColumnKind kind);
std::string to_string(ColumnRole role);
ColumnKind parse_column_kind(const std::string& text);
ColumnRole parse_column_role(const std::string& text);

}  // namespace weldnet
