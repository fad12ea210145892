#pragma once

#include <exception>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "genquest/error.hpp"

namespace genquest::api {

// Every JSON response body is exactly one of
//
//     {"data": <payload>}
//     {"error": {"code": "...", "message": "...", "retriable": bool, "details": <any>}}
//
// Codes are the ErrorCode strings plus "internal_error" for unexpected failures.

struct Response {
  int status = 200;
  nlohmann::json body;
};

Response ok(nlohmann::json data, int status = 200);
Response error_response(const Error& error);
Response error_response(int status, std::string_view code, std::string_view message, bool retriable = false,
                        nlohmann::json details = nullptr);

/// Maps the in-flight exception (call from a catch block) to an error response.
Response error_from_exception(std::exception_ptr error);

int http_status(ErrorCode code);

/// All error code strings a client can receive.
const std::vector<std::string>& error_codes();

/// Structural check used by tests and the acceptance suite; returns an empty
/// string when `body` is a valid envelope, else what is wrong with it.
std::string envelope_violation(const nlohmann::json& body);

}  // namespace genquest::api
