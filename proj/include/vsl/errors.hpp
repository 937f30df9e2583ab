#pragma once

#include <stdexcept>
#include <string>

namespace vsl {

// Malformed or inconsistent experiment configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid data encountered while reading files or running a pipeline
// (CLI exit code 3). Argument preconditions use std::invalid_argument.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vsl
