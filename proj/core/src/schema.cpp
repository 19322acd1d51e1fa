#include "weldnet/schema.hpp"

#include <set>

#include "weldnet/error.hpp"

namespace weldnet {

FeatureSchema::FeatureSchema(std::vector<ColumnSpec> columns)
    : columns_(std::move(columns)) {
  std::set<std::string> seen;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& col = columns_[i];
    if (col.name.empty()) {
      throw Error(ErrorCode::invalid_schema,
                  "column " + std::to_string(i) + " has an empty name");
    }
    if (!seen.insert(col.name).second) {
      throw Error(ErrorCode::invalid_schema,
                  "duplicate column name '" + col.name + "'");
    }
    switch (col.role) {
      case ColumnRole::input:
        input_columns_.push_back(i);
        break;
      case ColumnRole::target:
        if (col.kind != ColumnKind::numeric) {
          throw Error(ErrorCode::invalid_schema,
                      "target column '" + col.name + "' must be numeric");
        }
        target_columns_.push_back(i);
        break;
      case ColumnRole::group_key:
        if (group_column_) {
          throw Error(ErrorCode::invalid_schema,
                      "more than one group-key column ('" +
                          columns_[*group_column_].name + "', '" + col.name + "')");
        }
        group_column_ = i;
        break;
    }
  }
  if (target_columns_.empty() || target_columns_.size() > 2) {
    throw Error(ErrorCode::invalid_schema,
                "schema needs one or two target columns, found " +
                    std::to_string(target_columns_.size()));
  }
  if (input_columns_.empty()) {
    throw Error(ErrorCode::invalid_schema, "schema has no input columns");
  }
}

std::vector<std::string> FeatureSchema::input_names() const {
  std::vector<std::string> names;
  for (auto i : input_columns_) names.push_back(columns_[i].name);
  return names;
}

std::vector<std::string> FeatureSchema::target_names() const {
  std::vector<std::string> names;
  for (auto i : target_columns_) names.push_back(columns_[i].name);
  return names;
}

std::vector<std::string> FeatureSchema::column_names() const {
  std::vector<std::string> names;
  for (const auto& c : columns_) names.push_back(c.name);
  return names;
}

std::optional<std::size_t> FeatureSchema::find(const std::string& name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> FeatureSchema::input_index(const std::string& name) const {
  for (std::size_t k = 0; k < input_columns_.size(); ++k) {
    if (columns_[input_columns_[k]].name == name) return k;
  }
  return std::nullopt;
}

std::optional<std::size_t> FeatureSchema::target_index(const std::string& name) const {
  for (std::size_t k = 0; k < target_columns_.size(); ++k) {
    if (columns_[target_columns_[k]].name == name) return k;
  }
  return std::nullopt;
}

std::string to_string(ColumnKind kind) {
  return kind == ColumnKind::numeric ? "numeric" : "categorical";
}

std::string to_string(ColumnRole role) {
  switch (role) {
    case ColumnRole::input: return "input";
    case ColumnRole::target: return "target";
    case ColumnRole::group_key: return "group";
  }
  return "input";
}

ColumnKind parse_column_kind(const std::string& text) {
  if (text == "numeric") return ColumnKind::numeric;
  if (text == "categorical") return ColumnKind::categorical;
  throw Error(ErrorCode::invalid_schema, "unknown column kind '" + text + "'");
}

ColumnRole parse_column_role(const std::string& text) {
  if (text == "input") return ColumnRole::input;
  if (text == "target") return ColumnRole::target;
  if (text == "group" || text == "group-key" || text == "group_key") {
    return ColumnRole::group_key;
  }
  throw Error(ErrorCode::invalid_schema, "unknown column role '" + text + "'");
}

}  // namespace weldnet
