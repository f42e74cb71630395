#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dek {

// Machine-readable failure categories. The CLI prints these verbatim.
enum class ErrorCode {
  usage,
  config,
  io,
  data,
  shape,
  domain,
  numeric,
  diverged,
  no_variance,
};

std::string_view to_string(ErrorCode code);
int exit_status(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Dimension or layout mismatch between two objects that must agree.
class ShapeError : public Error {
 public:
  explicit ShapeError(const std::string& what) : Error(ErrorCode::shape, what) {}
};

/// Input outside the mathematical domain of an operation (NaN, Inf, ...).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorCode::domain, what) {}
};

class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorCode::data, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorCode::config, what) {}
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorCode::io, what) {}
};

}  // namespace dek
