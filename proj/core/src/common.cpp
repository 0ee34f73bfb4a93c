#include "meetmate/common.hpp"

namespace meetmate {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kInvalidDuration: return "invalid-duration";
    case ErrorCode::kUnknownPerson: return "unknown-person";
    case ErrorCode::kEmptyGrid: return "empty-grid";
    case ErrorCode::kTooManyConstraints: return "too-many-constraints";
    case ErrorCode::kUnknownConstraint: return "unknown-constraint-id";
    case ErrorCode::kInvalidIndex: return "invalid-index";
    case ErrorCode::kSessionClosed: return "already-closed";
    case ErrorCode::kInvalidParams: return "invalid-params";
    case ErrorCode::kUncoverablePlaceholder: return "uncoverable-placeholder";
    case ErrorCode::kParseError: return "parse-error";
    case ErrorCode::kTypeError: return "type-error";
    case ErrorCode::kCoderFailure: return "coder-failure";
    case ErrorCode::kTranslatorFailure: return "translator-failure";
    case ErrorCode::kTransport: return "transport";
    case ErrorCode::kNotFound: return "not-found";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

}  // namespace meetmate
