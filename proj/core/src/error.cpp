#include "weldnet/error.hpp"

namespace weldnet {

std::string_view error_code_name(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::io: return "IO";
    case ErrorCode::header_mismatch: return "HEADER_MISMATCH";
    case ErrorCode::arity: return "ARITY";
    case ErrorCode::parse: return "PARSE";
    case ErrorCode::unseen_category: return "UNSEEN_CATEGORY";
    case ErrorCode::empty_selection: return "EMPTY_SELECTION";
    case ErrorCode::column_mismatch: return "COLUMN_MISMATCH";
    case ErrorCode::missing_groups: return "MISSING_GROUPS";
    case ErrorCode::invalid_argument: return "INVALID_ARGUMENT";
    case ErrorCode::invalid_schema: return "INVALID_SCHEMA";
    case ErrorCode::dimension_mismatch: return "DIMENSION_MISMATCH";
    case ErrorCode::non_finite: return "NON_FINITE";
    case ErrorCode::unknown_version: return "UNKNOWN_VERSION";
    case ErrorCode::corrupted_dims: return "CORRUPTED_DIMS";
    case ErrorCode::schema_mismatch: return "SCHEMA_MISMATCH";
    case ErrorCode::config: return "CONFIG";
  }
  return "UNKNOWN";
}

}  // namespace weldnet
