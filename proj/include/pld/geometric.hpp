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
#include <limits>
#include <utility>
#include <vector>

#include "pld/discrete_pld.hpp"
#include "pld/errors.hpp"
#include "pld/kahan.hpp"
#include "pld/types.hpp"

namespace pld {

// A discrete distribution of exponentiated losses on a constant-ratio grid:
// point i has value base * e^{log_ratio * i}, i in [0, n). Mass may also
// sit at exactly 0 (p_zero, the image of a loss at -inf) and at +inf
// (p_top). The working representation inside allocation convolutions.
struct GeometricGridDist {
  double base = 1.0;
  double log_ratio = 1.0;
  std::vector<double> probs;
  double p_zero = 0.0;
  double p_top = 0.0;

  size_t size() const { return probs.size(); }
  double value(size_t i) const {
    return base * std::exp(log_ratio * static_cast<double>(i));
  }
  double total_mass() const {
    KahanSum acc;
    acc.add(p_zero);
    acc.add(p_top);
    for (double p : probs) acc.add(p);
    return acc.value();
  }
};

namespace detail {

inline int64_t& conv_call_counter() {
  thread_local int64_t count = 0;
  return count;
}

// First and last index with positive mass; {1, 0} when empty.
inline std::pair<int64_t, int64_t> nonzero_range(
    const std::vector<double>& probs) {
  int64_t lo = 0, hi = static_cast<int64_t>(probs.size()) - 1;
  while (lo <= hi && probs[static_cast<size_t>(lo)] == 0.0) ++lo;
  while (hi >= lo && probs[static_cast<size_t>(hi)] == 0.0) --hi;
  if (lo > hi) return {1, 0};
  return {lo, hi};
}

// Index arithmetic of the pairwise-sum grid. A pair (j, k) of input grid
// points sums to exactly index k + s(j - k) on the output grid with base
// a + b, where s(d) = [ln(a e^{alpha d} + b) - ln(a + b)] / alpha. s(0) == 0,
// so equal-index pairs land on grid points exactly. Rounding is right for
// upper bounds, left for lower, with near-integer hits snapped to the grid
// point in both directions.
inline int64_t rounded_shift(double a, double b, double alpha, double log_ab,
                             bool upper, int64_t d) {
  if (d == 0) return 0;
  double s;
  double ad = alpha * static_cast<double>(d);
  if (d > 0) {
    s = static_cast<double>(d) +
        (std::log(a + b * std::exp(-ad)) - log_ab) / alpha;
  } else {
    s = (std::log(a * std::exp(ad) + b) - log_ab) / alpha;
  }
  double r = std::nearbyint(s);
  if (std::abs(s - r) <= tol::kGridRel * std::max(1.0, std::abs(s))) {
    return static_cast<int64_t>(r);
  }
  return static_cast<int64_t>(upper ? std::ceil(s) : std::floor(s));
}

class ShiftTable {
 public:
  ShiftTable(double a, double b, double log_ratio, BoundDirection dir,
             int64_t d_min, int64_t d_max)
      : d_min_(d_min), shifts_(static_cast<size_t>(d_max - d_min + 1)) {
    const double log_ab = std::log(a + b);
    const bool upper = dir == BoundDirection::kUpper;
    for (int64_t d = d_min; d <= d_max; ++d) {
      shifts_[static_cast<size_t>(d - d_min)] =
          rounded_shift(a, b, log_ratio, log_ab, upper, d);
    }
  }

  int64_t operator()(int64_t d) const {
    return shifts_[static_cast<size_t>(d - d_min_)];
  }

 private:
  int64_t d_min_;
  std::vector<int64_t> shifts_;
};

// Same mapping, computed on first use; for sparse convolutions that touch
// few diagonals of a wide grid.
class LazyShiftTable {
 public:
  LazyShiftTable(double a, double b, double log_ratio, BoundDirection dir,
                 int64_t d_min, int64_t d_max)
      : a_(a),
        b_(b),
        alpha_(log_ratio),
        log_ab_(std::log(a + b)),
        upper_(dir == BoundDirection::kUpper),
        d_min_(d_min),
        shifts_(static_cast<size_t>(d_max - d_min + 1),
                std::numeric_limits<int64_t>::min()) {}

  int64_t operator()(int64_t d) {
    int64_t& slot = shifts_[static_cast<size_t>(d - d_min_)];
    if (slot == std::numeric_limits<int64_t>::min()) {
      slot = rounded_shift(a_, b_, alpha_, log_ab_, upper_, d);
    }
    return slot;
  }

 private:
  double a_, b_, alpha_, log_ab_;
  bool upper_;
  int64_t d_min_;
  std::vector<int64_t> shifts_;
};

// out[clamp(k + shift)] += scale * src[k] for k in [k0, k1]; mass whose
// target falls below the grid goes to *underflow_sink (the p_zero sink for
// lower-direction zero-pairs, or bin 0 when clamping up).
inline void scatter_with_shift(const std::vector<double>& src, int64_t k0,
                               int64_t k1, int64_t shift, double scale,
                               std::vector<double>& out, double* low_sink,
                               bool clamp_low_to_grid) {
  const int64_t n = static_cast<int64_t>(out.size());
  int64_t ki0 = std::max(k0, -shift);
  int64_t ki1 = std::min(k1, n - 1 - shift);
  for (int64_t k = k0; k <= k1 && k < ki0; ++k) {
    if (clamp_low_to_grid) {
      out[0] += scale * src[static_cast<size_t>(k)];
    } else {
      *low_sink += scale * src[static_cast<size_t>(k)];
    }
  }
  for (int64_t k = ki0; k <= ki1; ++k) {
    out[static_cast<size_t>(k + shift)] += scale * src[static_cast<size_t>(k)];
  }
  for (int64_t k = std::max(ki1 + 1, k0); k <= k1; ++k) {
    out[static_cast<size_t>(n - 1)] += scale * src[static_cast<size_t>(k)];
  }
}

}  // namespace detail

// Number of grid convolutions performed on this thread; tests use it to
// confirm the exponentiation-by-squaring call budget.
inline int64_t conv_call_count() { return detail::conv_call_counter(); }
inline void reset_conv_call_count() { detail::conv_call_counter() = 0; }

// Output grid of a convolution: same point count and ratio, base equal to
// the sum of bases, so the endpoints are exactly the extreme possible
// finite sums.
struct GridDescriptor {
  double base;
  double log_ratio;
  size_t n;
};

inline GridDescriptor range_renorm(const GeometricGridDist& x,
                                   const GeometricGridDist& y) {
  if (x.size() != y.size() || x.size() == 0) {
    throw MismatchedGridsError("range_renorm: grids must have equal size");
  }
  if (std::abs(x.log_ratio - y.log_ratio) >
      tol::kGridRel * std::max(x.log_ratio, y.log_ratio)) {
    throw MismatchedGridsError("range_renorm: grids must share log_ratio");
  }
  if (!(x.base > 0.0) || !(y.base > 0.0)) {
    throw MismatchedGridsError("range_renorm: grid bases must be positive");
  }
  return {x.base + y.base, x.log_ratio, x.size()};
}

// Distribution of X + Y on the range_renorm grid. All pairwise finite sums
// are formed with mass products; each sum rounds right (upper) or left
// (lower) onto the output grid. Pairs (0, y) keep the value y, rounded per
// direction, with below-grid mass clamped up to the base (upper) or sent to
// p_zero (lower); (0, 0) stays at zero; pairs involving +inf go to p_top
// (upper direction only). The true sum distribution lies stochastically
// between the lower and upper outputs.
inline GeometricGridDist conv(const GeometricGridDist& x,
                              const GeometricGridDist& y, BoundDirection dir) {
  GridDescriptor out_grid = range_renorm(x, y);
  const bool upper = dir == BoundDirection::kUpper;
  if (!upper && (x.p_top > 0.0 || y.p_top > 0.0)) {
    throw InvalidArgumentError(
        "conv: lower-direction convolution cannot take mass at +inf");
  }
  ++detail::conv_call_counter();

  const int64_t n = static_cast<int64_t>(out_grid.n);
  GeometricGridDist out;
  out.base = out_grid.base;
  out.log_ratio = out_grid.log_ratio;
  out.probs.assign(out_grid.n, 0.0);
  out.p_top = x.p_top + y.p_top - x.p_top * y.p_top;
  out.p_zero = x.p_zero * y.p_zero;

  // Zero-atom cross terms: (0, y_k) sums to y_k.
  auto scatter_zero_pairs = [&](const GeometricGridDist& other, double scale) {
    if (scale == 0.0) return;
    auto [lo, hi] = detail::nonzero_range(other.probs);
    if (lo > hi) return;
    double z = (std::log(other.base) - std::log(out.base)) / out.log_ratio;
    double r = std::nearbyint(z);
    int64_t shift;
    if (std::abs(z - r) <= tol::kGridRel * std::max(1.0, std::abs(z))) {
      shift = static_cast<int64_t>(r);
    } else {
      shift = static_cast<int64_t>(upper ? std::ceil(z) : std::floor(z));
    }
    detail::scatter_with_shift(other.probs, lo, hi, shift, scale, out.probs,
                               &out.p_zero, /*clamp_low_to_grid=*/upper);
  };
  scatter_zero_pairs(y, x.p_zero);
  scatter_zero_pairs(x, y.p_zero);

  auto [xlo, xhi] = detail::nonzero_range(x.probs);
  auto [ylo, yhi] = detail::nonzero_range(y.probs);
  if (xlo > xhi || ylo > yhi) return out;

  // Sparse inputs (a few atoms spread over a wide grid) pay per nonzero
  // pair; dense ones run contiguous per-diagonal loops.
  int64_t nx = 0, ny = 0;
  for (int64_t i = xlo; i <= xhi; ++i) nx += x.probs[static_cast<size_t>(i)] > 0.0;
  for (int64_t i = ylo; i <= yhi; ++i) ny += y.probs[static_cast<size_t>(i)] > 0.0;
  const uint64_t box = static_cast<uint64_t>(xhi - xlo + 1) *
                       static_cast<uint64_t>(yhi - ylo + 1);
  const uint64_t pairs = static_cast<uint64_t>(nx) * static_cast<uint64_t>(ny);
  const bool sparse = pairs <= (uint64_t(1) << 21) && pairs * 4 <= box;

  if (sparse) {
    std::vector<int64_t> xi, yi;
    xi.reserve(static_cast<size_t>(nx));
    yi.reserve(static_cast<size_t>(ny));
    for (int64_t i = xlo; i <= xhi; ++i) {
      if (x.probs[static_cast<size_t>(i)] > 0.0) xi.push_back(i);
    }
    for (int64_t i = ylo; i <= yhi; ++i) {
      if (y.probs[static_cast<size_t>(i)] > 0.0) yi.push_back(i);
    }
    detail::LazyShiftTable shift(x.base, y.base, out.log_ratio, dir,
                                 xlo - yhi, xhi - ylo);
    for (int64_t j : xi) {
      const double fj = x.probs[static_cast<size_t>(j)];
      for (int64_t k : yi) {
        int64_t t = k + shift(j - k);
        if (t < 0) t = 0;
        if (t > n - 1) t = n - 1;
        out.probs[static_cast<size_t>(t)] +=
            fj * y.probs[static_cast<size_t>(k)];
      }
    }
    return out;
  }

  const bool symmetric = &x == &y;
  detail::ShiftTable shift(x.base, y.base, out.log_ratio, dir,
                           symmetric ? 0 : xlo - yhi, xhi - ylo);
  const double* xp = x.probs.data();
  const double* yp = y.probs.data();
  double* o = out.probs.data();
  if (symmetric) {
    // Squaring: pairs (j, k) and (k, j) share an output bin since the bases
    // match, so only the upper triangle is walked.
    for (int64_t k = xlo; k <= xhi; ++k) {
      o[k] += xp[k] * xp[k];
    }
    for (int64_t d = 1; d <= xhi - xlo; ++d) {
      const int64_t s = shift(d);
      const int64_t k0 = xlo, k1 = xhi - d;
      const int64_t ki0 = std::max(k0, -s);
      const int64_t ki1 = std::min(k1, n - 1 - s);
      for (int64_t k = k0; k <= k1 && k < ki0; ++k) {
        o[0] += 2.0 * xp[k + d] * xp[k];
      }
      for (int64_t k = ki0; k <= ki1; ++k) {
        o[k + s] += 2.0 * xp[k + d] * xp[k];
      }
      for (int64_t k = std::max(ki1 + 1, k0); k <= k1; ++k) {
        o[n - 1] += 2.0 * xp[k + d] * xp[k];
      }
    }
  } else {
    for (int64_t d = xlo - yhi; d <= xhi - ylo; ++d) {
      const int64_t s = shift(d);
      const int64_t k0 = std::max(ylo, xlo - d);
      const int64_t k1 = std::min(yhi, xhi - d);
      const int64_t ki0 = std::max(k0, -s);
      const int64_t ki1 = std::min(k1, n - 1 - s);
      for (int64_t k = k0; k <= k1 && k < ki0; ++k) {
        o[0] += xp[k + d] * yp[k];
      }
      for (int64_t k = ki0; k <= ki1; ++k) {
        o[k + s] += xp[k + d] * yp[k];
      }
      for (int64_t k = std::max(ki1 + 1, k0); k <= k1; ++k) {
        o[n - 1] += xp[k + d] * yp[k];
      }
    }
  }
  return out;
}

// Clamps the distribution to its [q(beta), q(1-beta)] quantile range. For
// an upper bound the mass below q(beta) moves up onto it (keeping the bound
// valid for free) and the mass above q(1-beta) moves to +inf (consuming
// beta budget); the lower direction mirrors with p_zero. Grid storage is
// unchanged; only masses move.
inline void truncate_tails(GeometricGridDist& g, BoundDirection dir,
                           double beta) {
  if (beta <= 0.0) return;
  const size_t n = g.size();
  if (n == 0) return;
  if (dir == BoundDirection::kUpper) {
    if (g.p_zero < beta) {
      double cum = g.p_zero;
      size_t i = 0;
      double moved = g.p_zero;
      while (i < n && cum + g.probs[i] < beta) {
        cum += g.probs[i];
        moved += g.probs[i];
        g.probs[i] = 0.0;
        ++i;
      }
      if (i < n) {
        g.probs[i] += moved;
        g.p_zero = 0.0;
      }
    }
    double cum = g.p_top;
    size_t i = n;
    while (i > 0 && cum + g.probs[i - 1] < beta) {
      cum += g.probs[i - 1];
      g.p_top += g.probs[i - 1];
      g.probs[i - 1] = 0.0;
      --i;
    }
  } else {
    if (g.p_top < beta) {
      double cum = g.p_top;
      size_t i = n;
      double moved = g.p_top;
      while (i > 0 && cum + g.probs[i - 1] < beta) {
        cum += g.probs[i - 1];
        moved += g.probs[i - 1];
        g.probs[i - 1] = 0.0;
        --i;
      }
      if (i > 0) {
        g.probs[i - 1] += moved;
        g.p_top = 0.0;
      }
    }
    double cum = g.p_zero;
    size_t i = 0;
    while (i < n && cum + g.probs[i] < beta) {
      cum += g.probs[i];
      g.p_zero += g.probs[i];
      g.probs[i] = 0.0;
      ++i;
    }
  }
}

// m-fold sum of independent copies of X, bound in direction `dir`, via
// exponentiation by squaring: at most 2 ceil(log2 m) convolutions. After
// each convolution the tails beyond the trunc_beta quantiles are clamped
// per direction.
inline GeometricGridDist self_conv(const GeometricGridDist& x, int64_t m,
                                   BoundDirection dir, double trunc_beta) {
  if (m < 1) throw InvalidArgumentError("self_conv: m must be >= 1");
  if (m == 1) return x;
  GeometricGridDist base = x;
  GeometricGridDist acc;
  bool have_acc = false;
  int64_t remaining = m;
  while (remaining > 0) {
    if (remaining & 1) {
      if (have_acc) {
        acc = conv(base, acc, dir);
        truncate_tails(acc, dir, trunc_beta);
      } else {
        acc = base;
        have_acc = true;
      }
    }
    remaining >>= 1;
    if (remaining > 0) {
      base = conv(base, base, dir);
      truncate_tails(base, dir, trunc_beta);
    }
  }
  return acc;
}

// Exponentiates a PLD on an arithmetic grid onto the matching geometric
// grid (of e^L, or of e^{-L} when negate is set). Infinite atoms map to
// p_top / p_zero according to the sign of the exponent.
inline GeometricGridDist to_exp_grid(const DiscretePld& L, bool negate,
                                     double fallback_log_ratio = 1.0) {
  const auto& values = L.values();
  const size_t n = values.size();
  if (n == 0) {
    throw InvalidArgumentError("to_exp_grid: empty finite support");
  }
  double step = fallback_log_ratio;
  if (n >= 2) {
    step = (values[n - 1] - values[0]) / static_cast<double>(n - 1);
    if (!(step > 0.0)) {
      throw NotArithmeticError("to_exp_grid: grid step must be positive");
    }
    for (size_t i = 0; i < n; ++i) {
      double expect = std::fma(static_cast<double>(i), step, values[0]);
      if (std::abs(values[i] - expect) >
          tol::kGridRel * std::max(1.0, std::abs(values[i]))) {
        throw NotArithmeticError(
            "to_exp_grid: values are not an arithmetic progression");
      }
    }
  }
  GeometricGridDist g;
  g.log_ratio = step;
  g.probs.resize(n);
  if (!negate) {
    g.base = std::exp(values[0]);
    g.probs = L.probs();
    g.p_zero = L.p_bottom();
    g.p_top = L.p_top();
  } else {
    g.base = std::exp(-values[n - 1]);
    for (size_t i = 0; i < n; ++i) g.probs[i] = L.probs()[n - 1 - i];
    g.p_zero = L.p_top();
    g.p_top = L.p_bottom();
  }
  return g;
}

}  // namespace pld
