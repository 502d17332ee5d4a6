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
#include <utility>
#include <vector>

#include "pld/discrete_pld.hpp"
#include "pld/errors.hpp"
#include "pld/types.hpp"

namespace pld {

namespace detail {

// Round a real-valued grid index per direction, snapping near-integers to
// the grid point.
inline int64_t round_index(double idx, bool upper) {
  double r = std::nearbyint(idx);
  if (std::abs(idx - r) <= tol::kGridRel * std::max(1.0, std::abs(idx))) {
    return static_cast<int64_t>(r);
  }
  return static_cast<int64_t>(upper ? std::ceil(idx) : std::floor(idx));
}

inline bool is_arithmetic_with_step(const std::vector<double>& v, double step) {
  if (v.size() < 2) return true;
  for (size_t i = 1; i < v.size(); ++i) {
    double expect = std::fma(static_cast<double>(i), step, v[0]);
    if (std::abs(v[i] - expect) > tol::kGridRel * std::max(1.0, std::abs(v[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace detail

// Snaps a PLD onto the arithmetic grid of step `alpha` anchored at its own
// minimum value, rounding per direction. Infinite atoms pass through.
inline DiscretePld regrid(const DiscretePld& L, double alpha,
                          BoundDirection dir) {
  if (!(alpha > 0.0)) throw InvalidArgumentError("regrid: alpha must be > 0");
  if (L.size() == 0) return L;
  const auto& values = L.values();
  const auto& probs = L.probs();
  const bool upper = dir == BoundDirection::kUpper;
  const double anchor = values.front();
  const double span = values.back() - anchor;
  int64_t n =
      static_cast<int64_t>(std::ceil(span / alpha - tol::kGridRel)) + 1;
  if (n < 1) n = 1;
  std::vector<double> grid(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    grid[static_cast<size_t>(i)] =
        std::fma(static_cast<double>(i), alpha, anchor);
  }
  std::vector<double> masses(static_cast<size_t>(n), 0.0);
  for (size_t i = 0; i < values.size(); ++i) {
    if (probs[i] == 0.0) continue;
    int64_t idx = detail::round_index((values[i] - anchor) / alpha, upper);
    if (idx < 0) idx = 0;
    if (idx > n - 1) idx = n - 1;
    masses[static_cast<size_t>(idx)] += probs[i];
  }
  return DiscretePld(std::move(grid), std::move(masses), L.p_bottom(),
                     L.p_top());
}

// Distribution of L1 + L2 with finite sums snapped to an arithmetic grid of
// step `alpha` anchored at the exact minimum possible finite sum, rounding
// right (upper) or left (lower). A sum is +inf iff either term is; -inf
// mirrors; mass at +inf meeting mass at -inf has no defined sum and is
// rejected. The upper output stochastically dominates the exact sum with
// (alpha, 0) tightness per call.
inline DiscretePld compose(const DiscretePld& L1, const DiscretePld& L2,
                           double alpha, BoundDirection dir) {
  if (!(alpha > 0.0)) throw InvalidArgumentError("compose: alpha must be > 0");
  if ((L1.p_top() > 0.0 && L2.p_bottom() > 0.0) ||
      (L1.p_bottom() > 0.0 && L2.p_top() > 0.0)) {
    throw IndeterminateSumError(
        "compose: one input has mass at +inf and the other at -inf");
  }
  const double p_top = L1.p_top() + L2.p_top() - L1.p_top() * L2.p_top();
  const double p_bottom =
      L1.p_bottom() + L2.p_bottom() - L1.p_bottom() * L2.p_bottom();
  const double finite1 = 1.0 - L1.p_top() - L1.p_bottom();
  const double finite2 = 1.0 - L2.p_top() - L2.p_bottom();

  if (L1.size() == 0 || L2.size() == 0 || finite1 <= 0.0 || finite2 <= 0.0) {
    // No finite-by-finite mass. Finite atoms of one side paired with the
    // other's infinite atom are already in p_top / p_bottom.
    return DiscretePld({}, {}, p_bottom, p_top);
  }

  const auto& v1 = L1.values();
  const auto& v2 = L2.values();
  const double anchor = v1.front() + v2.front();
  const double max_sum = v1.back() + v2.back();
  int64_t n = static_cast<int64_t>(
                  std::ceil((max_sum - anchor) / alpha - tol::kGridRel)) +
              1;
  if (n < 1) n = 1;
  std::vector<double> grid(static_cast<size_t>(n));
  for (int64_t i = 0; i < n; ++i) {
    grid[static_cast<size_t>(i)] =
        std::fma(static_cast<double>(i), alpha, anchor);
  }
  std::vector<double> masses(static_cast<size_t>(n), 0.0);

  const bool upper = dir == BoundDirection::kUpper;
  const bool aligned = detail::is_arithmetic_with_step(v1, alpha) &&
                       detail::is_arithmetic_with_step(v2, alpha);
  const auto& p1 = L1.probs();
  const auto& p2 = L2.probs();
  auto nz1 = [&] {
    size_t lo = 0, hi = p1.size();
    while (lo < hi && p1[lo] == 0.0) ++lo;
    while (hi > lo && p1[hi - 1] == 0.0) --hi;
    return std::pair<size_t, size_t>(lo, hi);
  }();
  auto nz2 = [&] {
    size_t lo = 0, hi = p2.size();
    while (lo < hi && p2[lo] == 0.0) ++lo;
    while (hi > lo && p2[hi - 1] == 0.0) --hi;
    return std::pair<size_t, size_t>(lo, hi);
  }();

  if (aligned) {
    // Both inputs live on the output lattice: sums fall on grid points and
    // the convolution is exact.
    for (size_t j = nz1.first; j < nz1.second; ++j) {
      if (p1[j] == 0.0) continue;
      const double fj = p1[j];
      double* o = masses.data() + j;
      for (size_t k = nz2.first; k < nz2.second; ++k) {
        o[k] += fj * p2[k];
      }
    }
  } else {
    for (size_t j = nz1.first; j < nz1.second; ++j) {
      if (p1[j] == 0.0) continue;
      for (size_t k = nz2.first; k < nz2.second; ++k) {
        if (p2[k] == 0.0) continue;
        int64_t idx =
            detail::round_index((v1[j] + v2[k] - anchor) / alpha, upper);
        if (idx < 0) idx = 0;
        if (idx > n - 1) idx = n - 1;
        masses[static_cast<size_t>(idx)] += p1[j] * p2[k];
      }
    }
  }
  return DiscretePld(std::move(grid), std::move(masses), p_bottom, p_top);
}

namespace detail {

// Quantile clamp on an arithmetic-grid PLD, mirroring the geometric-grid
// truncation: the cheap side moves toward the median, the expensive side
// spills into the infinite atom of the bound's direction. Zero wings are
// then dropped.
inline DiscretePld truncate_pld_tails(const DiscretePld& L, BoundDirection dir,
                                      double beta) {
  if (beta <= 0.0 || L.size() == 0) return L;
  std::vector<double> values = L.values();
  std::vector<double> probs = L.probs();
  double p_bottom = L.p_bottom();
  double p_top = L.p_top();
  const size_t n = probs.size();
  if (dir == BoundDirection::kUpper) {
    if (p_bottom < beta) {
      double cum = p_bottom, moved = p_bottom;
      size_t i = 0;
      while (i < n && cum + probs[i] < beta) {
        cum += probs[i];
        moved += probs[i];
        probs[i] = 0.0;
        ++i;
      }
      if (i < n) {
        probs[i] += moved;
        p_bottom = 0.0;
      }
    }
    double cum = p_top;
    size_t i = n;
    while (i > 0 && cum + probs[i - 1] < beta) {
      cum += probs[i - 1];
      p_top += probs[i - 1];
      probs[i - 1] = 0.0;
      --i;
    }
  } else {
    if (p_top < beta) {
      double cum = p_top, moved = p_top;
      size_t i = n;
      while (i > 0 && cum + probs[i - 1] < beta) {
        cum += probs[i - 1];
        moved += probs[i - 1];
        probs[i - 1] = 0.0;
        --i;
      }
      if (i > 0) {
        probs[i - 1] += moved;
        p_top = 0.0;
      }
    }
    double cum = p_bottom;
    size_t i = 0;
    while (i < n && cum + probs[i] < beta) {
      cum += probs[i];
      p_bottom += probs[i];
      probs[i] = 0.0;
      ++i;
    }
  }
  // Drop zero wings; interior zeros stay so the grid remains arithmetic.
  size_t lo = 0, hi = n;
  while (lo < hi && probs[lo] == 0.0) ++lo;
  while (hi > lo && probs[hi - 1] == 0.0) --hi;
  return DiscretePld(
      std::vector<double>(values.begin() + lo, values.begin() + hi),
      std::vector<double>(probs.begin() + lo, probs.begin() + hi), p_bottom,
      p_top);
}

}  // namespace detail

// k-fold composition of L with itself via exponentiation by squaring: at
// most 2 ceil(log2 k) compose calls on a shared lattice of step
// alpha / (2 ceil(log2 k)), so the accumulated rounding shift stays at or
// below alpha. trunc_beta > 0 enables the per-convolution quantile clamp
// (budgeted across calls); composition leaves it off by default.
inline DiscretePld self_compose(const DiscretePld& L, int64_t k, double alpha,
                                BoundDirection dir, double trunc_beta = 0.0) {
  if (k < 1) throw InvalidArgumentError("self_compose: k must be >= 1");
  const int64_t call_budget = std::max<int64_t>(1, 2 * ceil_log2(k));
  const double alpha_call = alpha / static_cast<double>(call_budget);
  const double beta_call =
      trunc_beta > 0.0 ? trunc_beta / static_cast<double>(call_budget) : 0.0;

  DiscretePld base = regrid(L, alpha_call, dir);
  if (k == 1) return base;
  DiscretePld acc = base;
  bool have_acc = false;
  int64_t remaining = k;
  while (remaining > 0) {
    if (remaining & 1) {
      if (have_acc) {
        acc = detail::truncate_pld_tails(compose(base, acc, alpha_call, dir),
                                         dir, beta_call);
      } else {
        acc = base;
        have_acc = true;
      }
    }
    remaining >>= 1;
    if (remaining > 0) {
      base = detail::truncate_pld_tails(compose(base, base, alpha_call, dir),
                                        dir, beta_call);
    }
  }
  return acc;
}

}  // namespace pld
