#include "ratgraph/error.hpp"

namespace ratgraph {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidParameter:
      return "invalid-parameter";
    case ErrorCode::kInvalidInput:
      return "invalid-input";
    case ErrorCode::kNumericalFailure:
      return "numerical-failure";
    case ErrorCode::kPole:
      return "pole";
    case ErrorCode::kSingularSystem:
      return "singular-system";
    case ErrorCode::kNoFit:
      return "no-fit";
    case ErrorCode::kIo:
      return "io";
    case ErrorCode::kParse:
      return "parse";
  }
  return "unknown";
}

}  // namespace ratgraph
