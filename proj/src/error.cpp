#include "holomed/error.hpp"

namespace holomed {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid_input";
    case ErrorCode::Precondition: return "precondition";
    case ErrorCode::NotFound: return "not_found";
    case ErrorCode::Validation: return "validation";
    case ErrorCode::Conflict: return "conflict";
    case ErrorCode::Decode: return "decode";
    case ErrorCode::Asset: return "asset";
    case ErrorCode::Parse: return "parse";
    case ErrorCode::Config: return "config";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

}  // namespace holomed
