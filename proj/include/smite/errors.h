/*
 * Copyright 2026 The SMITE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SMITE_ERRORS_H_
#define SMITE_ERRORS_H_

#include <stdexcept>
#include <string>

namespace smite {

// Base class of every error raised by the library. The CLI maps the concrete
// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Operand dimensions do not conform.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// Dataset content violates an invariant (non-binary labels, bad
// propensity, ...).
class DataError : public Error {
 public:
  using Error::Error;
};

// Malformed input file (CSV or model file).
class ParseError : public DataError {
 public:
  using DataError::DataError;
};

// A NaN/Inf appeared where finite values are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// SGD produced a non-finite loss.
class DivergedError : public NumericError {
 public:
  using NumericError::NumericError;
};

// A dataset part lacks treated or control rows.
class StratificationError : public DataError {
 public:
  using DataError::DataError;
};

// The indirect loss only supports a propensity of 1/2.
class UnsupportedPropensityError : public DataError {
 public:
  using DataError::DataError;
};

// Invalid arguments, configuration keys or values.
class UsageError : public Error {
 public:
  using Error::Error;
};

}  // namespace smite

#endif  // SMITE_ERRORS_H_
