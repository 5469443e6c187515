#pragma once

#include <stdexcept>
#include <string>

namespace nmdim {

// I/O failures (unreadable/unwritable paths, malformed files).
struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Schema or configuration mismatches (wrong columns, bad flags).
struct SchemaError : std::runtime_error {
  explicit SchemaError(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor-dimension mismatches between operands.
struct DimensionError : std::runtime_error {
  explicit DimensionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Out-of-range parameter values.
struct ParamError : std::invalid_argument {
  explicit ParamError(const std::string& msg) : std::invalid_argument(msg) {}
};

// Numerical breakdown (probabilities far outside [0,1], etc.).
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace nmdim
