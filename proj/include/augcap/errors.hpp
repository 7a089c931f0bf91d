#pragma once

#include <stdexcept>
#include <string>

namespace augcap {

enum class ErrorCategory {
  kInput,
  kData,
  kConfig,
  kGeneration,
  kEmbedding,
  kVerification,
};

const char* to_string(ErrorCategory category);

// Base of every error the library throws. The category drives the CLI exit code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCategory category, const std::string& message)
      : std::runtime_error(message), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

 private:
  ErrorCategory category_;
};

class InputError : public Error {
 public:
  explicit InputError(const std::string& message) : Error(ErrorCategory::kInput, message) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& message) : Error(ErrorCategory::kData, message) {}
};

class DuplicateIdError : public DataError {
 public:
  explicit DuplicateIdError(std::string id)
      : DataError("duplicate record id \"" + id + "\""), id_(std::move(id)) {}
  const std::string& id() const noexcept { return id_; }

 private:
  std::string id_;
};

class MissingCaptionError : public DataError {
 public:
  explicit MissingCaptionError(std::string image_id)
      : DataError("no caption available for image \"" + image_id + "\""),
        image_id_(std::move(image_id)) {}
  const std::string& image_id() const noexcept { return image_id_; }

 private:
  std::string image_id_;
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message) : Error(ErrorCategory::kConfig, message) {}
};

class GenerationError : public Error {
 public:
  explicit GenerationError(const std::string& message)
      : Error(ErrorCategory::kGeneration, message) {}
};

class EmbeddingError : public Error {
 public:
  explicit EmbeddingError(const std::string& message)
      : Error(ErrorCategory::kEmbedding, message) {}
};

}  // namespace augcap
