#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ratgraph {

enum class ErrorCode {
  kInvalidParameter,
  kInvalidInput,
  kNumericalFailure,
  kPole,
  kSingularSystem,
  kNoFit,
  kIo,
  kParse,
};

std::string_view to_string(ErrorCode code);

// Library-wide exception. Every failure path in ratgraph throws this type;
// callers branch on code() rather than on message text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ratgraph
