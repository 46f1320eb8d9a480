#pragma once

#include <stdexcept>

namespace biphoton {

// Malformed input files or inconsistent user-supplied data. The CLI maps
// this (and std::invalid_argument from parameter validation) to exit code 2.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Iterative routine failed to converge or left its domain. Exit code 3.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace biphoton
