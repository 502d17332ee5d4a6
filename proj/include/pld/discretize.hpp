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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "pld/discrete_pld.hpp"
#include "pld/errors.hpp"
#include "pld/source.hpp"
#include "pld/types.hpp"

namespace pld {

namespace detail {
inline constexpr int64_t kMaxGridPoints = int64_t(1) << 25;
}

// Snaps a source onto the arithmetic grid [q_beta, q_beta + alpha, ...]
// covering q_{1-beta}. Upper direction assigns each interval's mass to its
// right endpoint, sends the upper tail to p_top and clamps the lower tail
// up onto the first grid point; lower direction mirrors. A value exactly on
// a grid point maps to that point in both directions. The result
// stochastically dominates the source (upper) or is dominated by it (lower)
// with (alpha, beta)-tightness. Zero-mass grid points are kept so the
// output is a full arithmetic progression.
inline DiscretePld discretize(const PldSource& source,
                              const TightnessParams& params,
                              BoundDirection dir) {
  params.require_positive_alpha("discretize");
  const double beta = params.beta;
  const double alpha = params.alpha;

  // Grid range: the beta quantiles of the finite part. Tail atoms at
  // +-inf heavier than beta pin the range at the finite support bounds.
  double lo = beta <= source.p_bottom() ? source.finite_support_min()
                                        : source.quantile(beta);
  double hi = beta <= source.p_top() ? source.finite_support_max()
                                     : source.quantile(1.0 - beta);
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo <= hi)) {
    throw OutOfRangeError(
        "discretize: beta quantile range is unbounded; an unbounded source "
        "needs beta > 0");
  }

  int64_t n = static_cast<int64_t>(
                  std::ceil((hi - lo) / alpha - tol::kGridRel)) +
              1;
  if (n < 1) n = 1;
  if (n > detail::kMaxGridPoints) {
    throw TooLargeError("discretize: grid would need " + std::to_string(n) +
                        " points");
  }

  std::vector<double> grid(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    grid[static_cast<size_t>(i)] = std::fma(static_cast<double>(i), alpha, lo);
  }

  std::vector<double> masses(static_cast<size_t>(n), 0.0);
  double p_bottom = 0.0;
  double p_top = 0.0;
  if (dir == BoundDirection::kUpper) {
    // mass((l_{i-1}, l_i]) -> l_i; everything below the grid clamps up to
    // l_0; everything above goes to +inf. Upper-half masses use survival
    // differences to dodge cancellation near F = 1.
    double prev_cdf = 0.0;
    size_t i = 0;
    for (; i < grid.size(); ++i) {
      double c = source.cdf(grid[i]);
      if (c > 0.5) break;
      masses[i] = c - prev_cdf;
      prev_cdf = c;
    }
    double prev_sf = 1.0 - prev_cdf;
    for (; i < grid.size(); ++i) {
      double s = source.sf(grid[i]);
      masses[i] = prev_sf - s;
      prev_sf = s;
    }
    p_top = prev_sf;
  } else {
    // mass([l_i, l_{i+1})) -> l_i; everything above the top grid point
    // clamps down onto it (including any +inf atom); everything strictly
    // below the grid goes to -inf.
    p_bottom = source.cdf_left(grid[0]);
    double prev_cdf = p_bottom;
    size_t i = 1;
    for (; i < grid.size(); ++i) {
      double c = source.cdf_left(grid[i]);
      if (c > 0.5) break;
      masses[i - 1] = c - prev_cdf;
      prev_cdf = c;
    }
    double prev_sf = 1.0 - prev_cdf;
    for (; i < grid.size(); ++i) {
      double s = source.sf_left(grid[i]);
      masses[i - 1] = prev_sf - s;
      prev_sf = s;
    }
    masses[grid.size() - 1] = prev_sf;
  }

  for (double& m : masses) {
    if (m < 0.0) m = 0.0;  // cdf rounding jitter
  }
  return DiscretePld(std::move(grid), std::move(masses), p_bottom, p_top);
}

}  // namespace pld
