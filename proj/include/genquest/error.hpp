#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace genquest {

/// Closed set of failure classes. Each maps to one machine-readable code
/// string and one HTTP status in the API layer.
enum class ErrorCode {
  validation,
  not_found,
  sequencing,
  busy,
  provider_unavailable,
  provider_config,
  structured_output,
  storage,
  integrity,
};

std::string_view to_string(ErrorCode code);

/// Busy, provider-unavailable and structured-output failures can succeed on retry.
bool is_retriable(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, nlohmann::json details = nullptr);

  ErrorCode code() const noexcept { return code_; }
  bool retriable() const noexcept { return is_retriable(code_); }
  const nlohmann::json& details() const noexcept { return details_; }

 private:
  ErrorCode code_;
  nlohmann::json details_;
};

}  // namespace genquest
