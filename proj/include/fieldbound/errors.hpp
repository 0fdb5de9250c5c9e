#pragma once

#include <stdexcept>
#include <string>

namespace fieldbound {

// Bad user-supplied configuration (CLI exit code 2).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Exact enumeration would exceed the configured outcome cap.
struct EnumerationCapError : std::runtime_error {
  explicit EnumerationCapError(const std::string& msg) : std::runtime_error(msg) {}
};

// Exact enumeration requested for a model with a continuous marginal.
struct NonEnumerableError : std::runtime_error {
  explicit NonEnumerableError(const std::string& msg) : std::runtime_error(msg) {}
};

// A sample does not carry values for every site an evaluation needs.
struct SupportError : std::runtime_error {
  explicit SupportError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fieldbound
