#pragma once

#include <stdexcept>
#include <string>

namespace stancekit {

/// Violated precondition or schema contract. Maps to exit code 1 in the CLI.
class ContractViolation : public std::runtime_error {
 public:
  explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

/// Filesystem or stream failure. Maps to exit code 2 in the CLI.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stancekit
