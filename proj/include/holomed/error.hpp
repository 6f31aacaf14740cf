#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace holomed {

enum class ErrorCode {
  InvalidInput,
  Precondition,
  NotFound,
  Validation,
  Conflict,
  Decode,
  Asset,
  Parse,
  Config,
  Io,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the whole library. `where` carries the field
// path, byte offset, or line number that locates the problem, when known.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string where = {})
      : std::runtime_error(where.empty() ? message : where + ": " + message),
        code_(code),
        where_(std::move(where)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& where() const noexcept { return where_; }

 private:
  ErrorCode code_;
  std::string where_;
};

}  // namespace holomed
