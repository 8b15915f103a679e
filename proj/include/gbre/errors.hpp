#pragma once

#include <stdexcept>
#include <string>

namespace gbre {

// Error categories map onto CLI exit codes: usage=2, data=3, numeric=4.
struct UsageError : std::runtime_error {
  explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

struct NumericError : std::runtime_error {
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

// Thrown by tensor ops when operand shapes do not conform.
struct ShapeError : NumericError {
  explicit ShapeError(const std::string& msg) : NumericError(msg) {}
};

}  // namespace gbre
