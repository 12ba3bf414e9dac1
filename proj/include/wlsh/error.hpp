#pragma once

#include <stdexcept>
#include <string>

namespace wlsh {

// Invalid input or configuration (bad p, dimensionality mismatch, k > n, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A weight-vector set cannot be partitioned under the requested table cap.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or unreadable files.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wlsh
