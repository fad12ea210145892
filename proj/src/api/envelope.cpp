#include "genquest/api/envelope.hpp"

#include <algorithm>
#include <vector>

namespace genquest::api {

Response ok(nlohmann::json data, int status) { return {status, nlohmann::json{{"data", std::move(data)}}}; }

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::validation:
      return 400;
    case ErrorCode::not_found:
      return 404;
    case ErrorCode::sequencing:
    case ErrorCode::busy:
      return 409;
    case ErrorCode::provider_unavailable:
    case ErrorCode::provider_config:
    case ErrorCode::structured_output:
      return 502;
    case ErrorCode::storage:
    case ErrorCode::integrity:
      return 500;
  }
  return 500;
}

Response error_response(int status, std::string_view code, std::string_view message, bool retriable,
                        nlohmann::json details) {
  return {status, nlohmann::json{{"error",
                                  {{"code", code},
                                   {"message", message},
                                   {"retriable", retriable},
                                   {"details", details.is_object()  ? std::move(details)
                                               : details.is_null() ? nlohmann::json::object()
                                                                   : nlohmann::json{{"info", std::move(details)}}}}}}};
}

Response error_response(const Error& error) {
  return error_response(http_status(error.code()), to_string(error.code()), error.what(), error.retriable(),
                        error.details());
}

Response error_from_exception(std::exception_ptr error) {
  try {
    std::rethrow_exception(error);
  } catch (const Error& e) {
    return error_response(e);
  } catch (const nlohmann::json::exception& e) {
    return error_response(400, to_string(ErrorCode::validation), std::string("malformed request body: ") + e.what());
  } catch (const std::exception& e) {
    return error_response(500, "internal_error", e.what());
  } catch (...) {
    return error_response(500, "internal_error", "unknown failure");
  }
}

const std::vector<std::string>& error_codes() {
  static const std::vector<std::string> codes = [] {
    std::vector<std::string> out;
    for (auto code : {ErrorCode::validation, ErrorCode::not_found, ErrorCode::sequencing, ErrorCode::busy,
                      ErrorCode::provider_unavailable, ErrorCode::provider_config, ErrorCode::structured_output,
                      ErrorCode::storage, ErrorCode::integrity}) {
      out.emplace_back(to_string(code));
    }
    out.emplace_back("internal_error");
    return out;
  }();
  return codes;
}

std::string envelope_violation(const nlohmann::json& body) {
  if (!body.is_object()) {
    return "body is not a JSON object";
  }
  const bool has_data = body.contains("data");
  const bool has_error = body.contains("error");
  if (has_data == has_error) {
    return "body must carry exactly one of data/error";
  }
  if (body.size() != 1) {
    return "unexpected top-level keys";
  }
  if (has_data) {
    return {};
  }
  const auto& e = body["error"];
  if (!e.is_object()) {
    return "error is not an object";
  }
  if (!e.contains("code") || !e["code"].is_string()) {
    return "error.code missing or not a string";
  }
  const auto& codes = error_codes();
  if (std::find(codes.begin(), codes.end(), e["code"].get<std::string>()) == codes.end()) {
    return "error.code '" + e["code"].get<std::string>() + "' is not a documented code";
  }
  if (!e.contains("message") || !e["message"].is_string()) {
    return "error.message missing or not a string";
  }
  if (!e.contains("retriable") || !e["retriable"].is_boolean()) {
    return "error.retriable missing or not a boolean";
  }
  if (e.contains("details") && !e["details"].is_object()) {
    return "error.details is not an object";
  }
  return {};
}

}  // namespace genquest::api
