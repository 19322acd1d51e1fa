#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace weldnet {

/// Stable error categories. The CLI prints the `name()` of the code as a
/// machine-parseable prefix, so existing names must not change.
enum class ErrorCode {
  io,
  header_mismatch,
  arity,
  parse,
  unseen_category,
  empty_selection,
  column_mismatch,
  missing_groups,
  invalid_argument,
  invalid_schema,
  dimension_mismatch,
  non_finite,
  unknown_version,
  corrupted_dims,
  schema_mismatch,
  config,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace weldnet
