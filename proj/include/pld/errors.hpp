// Copyright 2025 The pld-accounting Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace pld {

// Base class for all library errors. Subclasses distinguish bad inputs
// (InvalidArgumentError, InvalidDistributionError) from numerical-domain
// failures hit during a computation (everything else).
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

// A probability vector or pair fails its basic sanity checks.
class InvalidDistributionError : public Error {
 public:
  using Error::Error;
};

// An operation that requires a loss-distribution realization (no mass at
// -inf, E[e^-L] <= 1) was handed something else.
class InvalidRealizationError : public Error {
 public:
  using Error::Error;
};

// A query (epsilon/delta inversion, quantile) has no answer in range.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

// Grid values expected to form an arithmetic progression do not.
class NotArithmeticError : public Error {
 public:
  using Error::Error;
};

// Two grids fed to a convolution do not share point count or ratio.
class MismatchedGridsError : public Error {
 public:
  using Error::Error;
};

// An enumeration or grid would exceed the configured size cap.
class TooLargeError : public Error {
 public:
  using Error::Error;
};

// Adding +inf mass to -inf mass has no defined result.
class IndeterminateSumError : public Error {
 public:
  using Error::Error;
};

}  // namespace pld
