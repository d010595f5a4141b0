#pragma once

#include <stdexcept>
#include <string>

namespace sparse_bandit {

/// Caller supplied arguments that violate an operation's preconditions.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical routine failed (factorization, non-finite value, ...).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An object was used in a state where the operation is not defined.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace sparse_bandit
