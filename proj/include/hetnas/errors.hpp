// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace hetnas {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Incompatible tensor or matrix shapes.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument or configuration value outside its legal range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Malformed, missing or inconsistent dataset input.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Non-finite values, divergence, or a metric that is undefined for the input.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Misuse of a gradient tape (reuse after backward, foreign loss, ...).
class TapeError : public Error {
 public:
  using Error::Error;
};

}  // namespace hetnas
