#include "genquest/error.hpp"

namespace genquest {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation:
      return "validation_error";
    case ErrorCode::not_found:
      return "not_found";
    case ErrorCode::sequencing:
      return "sequencing_error";
    case ErrorCode::busy:
      return "busy";
    case ErrorCode::provider_unavailable:
      return "provider_unavailable";
    case ErrorCode::provider_config:
      return "provider_config_error";
    case ErrorCode::structured_output:
      return "structured_output_error";
    case ErrorCode::storage:
      return "storage_error";
    case ErrorCode::integrity:
      return "integrity_error";
  }
  return "internal_error";
}

bool is_retriable(ErrorCode code) {
  return code == ErrorCode::busy || code == ErrorCode::provider_unavailable ||
         code == ErrorCode::structured_output;
}

Error::Error(ErrorCode code, const std::string& message, nlohmann::json details)
    : std::runtime_error(message), code_(code), details_(std::move(details)) {}

}  // namespace genquest
