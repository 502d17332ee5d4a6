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

#include <cmath>
#include <cstdint>
#include <string>

#include "pld/errors.hpp"

namespace pld {

// Central tolerances. Binary64 throughout; these sit roughly an order of
// magnitude above accumulation error at 1e6-term compensated sums.
namespace tol {
inline constexpr double kMass = 1e-9;         // |total mass - 1| allowance
inline constexpr double kCcdfSlack = 1e-12;   // slack in CCDF comparisons
inline constexpr double kBisection = 1e-12;   // default epsilon-search tolerance
inline constexpr double kGridRel = 1e-9;      // grid-spacing / tie-snap tolerance
inline constexpr double kValueTie = 1e-12;    // support values closer than this
                                              // (relative) are the same point
}  // namespace tol

// Pessimistic (dominating) vs. optimistic (dominated) rounding.
enum class BoundDirection { kUpper, kLower };

// Add/remove dataset adjacency.
enum class AdjacencyDirection { kRemove, kAdd };

inline BoundDirection flipped(BoundDirection dir) {
  return dir == BoundDirection::kUpper ? BoundDirection::kLower
                                       : BoundDirection::kUpper;
}

inline std::string to_string(BoundDirection dir) {
  return dir == BoundDirection::kUpper ? "upper" : "lower";
}

inline std::string to_string(AdjacencyDirection adj) {
  return adj == AdjacencyDirection::kRemove ? "remove" : "add";
}

// Approximation budget: grid width `alpha` (nats) and tail-mass budget
// `beta`. Together they quantify how tightly a transform's output brackets
// the exact object. Grid-producing operations require alpha > 0; domination
// checks accept alpha == 0.
struct TightnessParams {
  double alpha = 1e-3;
  double beta = 1e-10;

  TightnessParams() = default;
  TightnessParams(double alpha_in, double beta_in)
      : alpha(alpha_in), beta(beta_in) {
    validate();
  }

  void validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
      throw InvalidArgumentError("TightnessParams: alpha must be nonnegative");
    }
    if (!(beta >= 0.0 && beta < 1.0)) {
      throw InvalidArgumentError("TightnessParams: beta must be in [0, 1)");
    }
  }

  void require_positive_alpha(const char* op) const {
    validate();
    if (alpha == 0.0) {
      throw InvalidArgumentError(std::string(op) +
                                 ": alpha must be strictly positive");
    }
  }
};

// Poisson sampling rate. 1 - lambda is carried alongside lambda so that
// values of lambda near 1 keep full precision in the transforms.
struct SamplingRate {
  double lambda = 1.0;
  double one_minus_lambda = 0.0;

  SamplingRate() = default;
  explicit SamplingRate(double lambda_in)
      : lambda(lambda_in), one_minus_lambda(1.0 - lambda_in) {
    validate();
  }
  static SamplingRate from_complement(double one_minus) {
    SamplingRate r;
    r.lambda = 1.0 - one_minus;
    r.one_minus_lambda = one_minus;
    r.validate();
    return r;
  }

  void validate() const {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
      throw InvalidArgumentError("SamplingRate: lambda must be in [0, 1]");
    }
  }
};

inline int64_t ceil_log2(int64_t t) {
  if (t <= 1) return 0;
  int64_t bits = 0;
  uint64_t v = static_cast<uint64_t>(t - 1);
  while (v > 0) {
    v >>= 1;
    ++bits;
  }
  return bits;
}

}  // namespace pld
