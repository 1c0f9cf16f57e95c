#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mref {

/// Exception carrying a module-specific error code. `Code` must have a
/// `to_string(Code)` overload findable by ADL.
template <typename Code>
class CodedError : public std::runtime_error {
 public:
  CodedError(Code code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  Code code() const noexcept { return code_; }

 private:
  Code code_;
};

}  // namespace mref
