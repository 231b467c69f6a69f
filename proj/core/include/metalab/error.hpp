#pragma once

#include <stdexcept>
#include <string>

namespace metalab {

// Violated precondition or type invariant on user-supplied data.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Failure while running a pipeline (numeric trouble, I/O, unsupported sizes).
class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace metalab
