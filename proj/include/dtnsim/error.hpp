#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dtnsim {

enum class ErrorCode {
  kInvalidRoute,
  kInvalidTime,
  kInvalidPosition,
  kMissingGateway,
  kInvalidParameter,
  kConfig,
  kFeedFormat,
  kLookup,
  kStatistics,
  kAggregation,
  kInvariant,
  kIo,
};

const char* to_string(ErrorCode code);

// Every failure surfaced by the library is an Error carrying a code, so the
// CLI can map it onto an exit status without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string field, const std::string& message)
      : Error(ErrorCode::kConfig, field + ": " + message), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

class FeedError : public Error {
 public:
  /// `line` is 1-based; 0 means the error concerns the file as a whole.
  FeedError(std::string file, std::size_t line, const std::string& message)
      : Error(ErrorCode::kFeedFormat, describe(file, line, message)),
        file_(std::move(file)),
        line_(line) {}

  const std::string& file() const noexcept { return file_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string describe(const std::string& file, std::size_t line, const std::string& message) {
    if (line == 0) return file + ": " + message;
    return file + ":" + std::to_string(line) + ": " + message;
  }

  std::string file_;
  std::size_t line_;
};

}  // namespace dtnsim
