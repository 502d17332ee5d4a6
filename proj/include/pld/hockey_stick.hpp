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
#include <limits>

#include "pld/discrete_pld.hpp"
#include "pld/errors.hpp"
#include "pld/kahan.hpp"
#include "pld/types.hpp"

namespace pld {

// E[(1 - e^{epsilon - L})_+]: the delta of (epsilon, delta)-DP when L bounds
// the privacy loss. The -inf atom contributes 0, the +inf atom contributes
// its full mass. Nonincreasing in epsilon, with range
// [p_top, 1 - p_bottom].
inline double hockey_stick_delta(const DiscretePld& L, double epsilon) {
  if (!std::isfinite(epsilon)) {
    throw InvalidArgumentError("hockey_stick_delta: epsilon must be finite");
  }
  const auto& values = L.values();
  const auto& probs = L.probs();
  KahanSum acc;
  acc.add(L.p_top());
  // Only atoms with value > epsilon contribute; walk down from the top.
  for (size_t i = values.size(); i-- > 0;) {
    if (values[i] <= epsilon) break;
    if (probs[i] > 0.0) {
      acc.add(probs[i] * (-std::expm1(epsilon - values[i])));
    }
  }
  double delta = acc.value();
  if (delta < 0.0) delta = 0.0;
  if (delta > 1.0) delta = 1.0;
  return delta;
}

// Smallest epsilon (within `tolerance`) with hockey_stick_delta <= delta,
// by bracket expansion plus bisection. Returns -inf when every epsilon
// qualifies (delta >= 1 - p_bottom up to rounding). A delta below p_top is
// unreachable at any finite epsilon; a delta above 1 - p_bottom needs no
// epsilon at all. Both are rejected.
inline double epsilon_for_delta(const DiscretePld& L, double delta,
                                double tolerance = tol::kBisection) {
  if (!(delta >= 0.0 && delta <= 1.0)) {
    throw OutOfRangeError("epsilon_for_delta: delta outside [0, 1]");
  }
  if (delta < L.p_top()) {
    throw OutOfRangeError(
        "epsilon_for_delta: delta below the +inf atom mass; no finite "
        "epsilon achieves it");
  }
  if (delta > 1.0 - L.p_bottom() + tol::kCcdfSlack) {
    throw OutOfRangeError(
        "epsilon_for_delta: delta exceeds the total finite-and-above mass");
  }
  if (L.size() == 0) {
    // Pure infinite atoms: delta(eps) == p_top for every epsilon.
    return -std::numeric_limits<double>::infinity();
  }

  double hi = L.values().back();  // delta(hi) == p_top <= delta
  double lo = L.values().front() - 1.0;
  double step = 1.0;
  int expansions = 0;
  while (hockey_stick_delta(L, lo) <= delta) {
    if (++expansions > 64) {
      return -std::numeric_limits<double>::infinity();
    }
    lo -= step;
    step *= 2.0;
  }
  // Invariant: delta(lo) > delta >= delta(hi).
  for (int iter = 0; iter < 200 && hi - lo > tolerance; ++iter) {
    double mid = 0.5 * (lo + hi);
    if (hockey_stick_delta(L, mid) <= delta) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace pld
