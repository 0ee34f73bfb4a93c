#pragma once

#include <json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace meetmate {

/// Insertion-ordered JSON; every persisted document is written through this
/// type so output is stable across runs.
using Json = nlohmann::ordered_json;

enum class ErrorCode {
  kInvalidArgument,
  kInvalidDuration,
  kUnknownPerson,
  kEmptyGrid,
  kTooManyConstraints,
  kUnknownConstraint,
  kInvalidIndex,
  kSessionClosed,
  kInvalidParams,
  kUncoverablePlaceholder,
  kParseError,
  kTypeError,
  kCoderFailure,
  kTranslatorFailure,
  kTransport,
  kNotFound,
  kIo,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace meetmate
