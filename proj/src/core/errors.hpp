#pragma once

#include <stdexcept>
#include <string>

namespace rspi {

// Precondition violated by the caller (bad value, wrong dimension, ...).
class InvalidInput : public std::invalid_argument {
 public:
  explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

// Operation not valid for the current object state (e.g. selecting from an empty pool).
class StateError : public std::logic_error {
 public:
  explicit StateError(const std::string& what) : std::logic_error(what) {}
};

// Filesystem / parse failures.
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace rspi
