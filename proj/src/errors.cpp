#include "augcap/errors.hpp"

namespace augcap {

const char* to_string(ErrorCategory category) {
  switch (category) {
    case ErrorCategory::kInput:
      return "input";
    case ErrorCategory::kData:
      return "data";
    case ErrorCategory::kConfig:
      return "config";
    case ErrorCategory::kGeneration:
      return "generation";
    case ErrorCategory::kEmbedding:
      return "embedding";
    case ErrorCategory::kVerification:
      return "verification";
  }
  return "unknown";
}

}  // namespace augcap
