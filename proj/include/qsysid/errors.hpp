// Copyright 2026 The qsysid Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace qsysid {

/// Base class of every exception thrown by this library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: wrong dimensions, out-of-range parameters, malformed data.
class ValidationError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// A well-formed input on which the computation cannot proceed numerically.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Negative power requested of an operator with eigenvalues below the cutoff.
class SingularOperator : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Reference state is not invertible, so the forward map cannot be inverted.
class NotAdmissible : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A Choi matrix (or bipartite output state) with eigenvalues below tolerance.
class NotCompletelyPositive : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// A trial row where the reconstruction fidelity fell below the analytic bound.
class BoundViolation : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ValidationError(message);
}

inline void require_dims(bool condition, const std::string& message) {
  if (!condition) throw DimensionMismatch(message);
}

}  // namespace detail
}  // namespace qsysid
