#pragma once

#include <stdexcept>
#include <string>

namespace xclab {

/// Malformed or out-of-contract input. The CLI maps this to exit code 2.
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation that could not complete (budget exceeded, no witness found).
/// The CLI maps this to exit code 1.
class ComputationError : public std::runtime_error {
 public:
  explicit ComputationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace xclab
