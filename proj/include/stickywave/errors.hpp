#pragma once

#include <stdexcept>
#include <string>

namespace stickywave {

// Bad user input: malformed spec strings, violated preconditions. CLI exit code 2.
class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(const std::string& what) : std::invalid_argument(what) {}
};

// Quadrature that did not converge, event solver failures, caps exceeded. CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stickywave
