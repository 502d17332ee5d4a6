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
#include <memory>
#include <utility>
#include <vector>

#include "pld/compose.hpp"
#include "pld/discrete_pld.hpp"
#include "pld/discretize.hpp"
#include "pld/errors.hpp"
#include "pld/geometric.hpp"
#include "pld/source.hpp"
#include "pld/types.hpp"

namespace pld {

// Parameters of the k-out-of-t random allocation scheme.
struct AllocationParams {
  int64_t t = 1;
  int64_t k = 1;
  TightnessParams tightness;

  AllocationParams() = default;
  AllocationParams(int64_t t_in, int64_t k_in, TightnessParams tightness_in)
      : t(t_in), k(k_in), tightness(tightness_in) {
    validate();
  }
  void validate() const {
    if (t < 1) throw InvalidArgumentError("AllocationParams: t must be >= 1");
    if (k < 1 || k > t) {
      throw InvalidArgumentError("AllocationParams: k must be in [1, t]");
    }
    tightness.validate();
  }
};

namespace detail {

struct AllocGridParams {
  double alpha_prime;
  double beta_prime;
};

inline AllocGridParams alloc_grid_params(int64_t t,
                                         const TightnessParams& params) {
  double divisor = static_cast<double>(2 * ceil_log2(t) + 1);
  return {params.alpha / divisor, params.beta / static_cast<double>(t)};
}

inline void pad_to_common_size(GeometricGridDist& a, GeometricGridDist& b) {
  size_t n = std::max(a.size(), b.size());
  a.probs.resize(n, 0.0);
  b.probs.resize(n, 0.0);
}

// Finite part of ln(G / t): grid values map to ln(value) - ln(t) with
// masses unchanged; p_zero and p_top are returned to the caller, which
// decides which infinity they belong to.
inline std::vector<std::pair<double, double>> log_scaled_atoms(
    const GeometricGridDist& g, int64_t t) {
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(g.size());
  const double log_t = std::log(static_cast<double>(t));
  const double log_base = std::log(g.base);
  for (size_t i = 0; i < g.size(); ++i) {
    if (g.probs[i] == 0.0) continue;
    atoms.emplace_back(
        std::fma(static_cast<double>(i), g.log_ratio, log_base) - log_t,
        g.probs[i]);
  }
  return atoms;
}

}  // namespace detail

// PLD bound for 1-out-of-t random allocation, remove direction: the loss of
// (avg_i Q^{i-1} x P x Q^{t-i}, Q^t) given a source bounding the loss of
// (P, Q). Equals ln((1/t)(e^{L} + sum of t-1 copies of e^{-dual L})), so the
// work is one discretization, one dual, and t-1 exp-grid convolutions done
// by squaring. The upper output stochastically dominates the exact
// transform with (alpha, beta)-tightness; the lower output is dominated.
inline DiscretePld rand_alloc_remove(const PldSource& source, int64_t t,
                                     const TightnessParams& params,
                                     BoundDirection dir) {
  params.require_positive_alpha("rand_alloc_remove");
  if (t < 1) throw InvalidArgumentError("rand_alloc_remove: t must be >= 1");
  if (t == 1) return discretize(source, params, dir);
  const auto grid = detail::alloc_grid_params(t, params);
  const TightnessParams step_params(grid.alpha_prime, grid.beta_prime);

  GeometricGridDist u1, v1;
  if (dir == BoundDirection::kUpper) {
    DiscretePld l1 = discretize(source, step_params, BoundDirection::kUpper);
    DiscretePld dual = pld_dual(l1);
    u1 = to_exp_grid(l1, /*negate=*/false, grid.alpha_prime);
    v1 = to_exp_grid(dual, /*negate=*/true, grid.alpha_prime);
  } else {
    // The dual of a lower-bound object is not itself a valid bound, so the
    // lower path discretizes the dual's own source with upper rounding:
    // e^{-x} is decreasing, which turns that into the required lower bound
    // on e^{-dual}.
    DiscretePld l1 = discretize(source, step_params, BoundDirection::kLower);
    std::unique_ptr<PldSource> dual_src = source.dual_source();
    DiscretePld dual_up =
        discretize(*dual_src, step_params, BoundDirection::kUpper);
    u1 = to_exp_grid(l1, /*negate=*/false, grid.alpha_prime);
    v1 = to_exp_grid(dual_up, /*negate=*/true, grid.alpha_prime);
    detail::pad_to_common_size(u1, v1);
  }

  GeometricGridDist w = self_conv(v1, t - 1, dir, grid.beta_prime);
  GeometricGridDist z = conv(w, u1, dir);

  auto atoms = detail::log_scaled_atoms(z, t);
  // z.p_zero can only come from all factors being zero; e^{L} is never
  // zero in the upper path, so only lower outputs carry -inf mass.
  return DiscretePld::from_atoms(std::move(atoms), z.p_zero, z.p_top);
}

// Add direction: the loss of (Q^t, avg_i Q^{i-1} x P x Q^{t-i}) given a
// source bounding the loss of (Q, P). Equals -ln((1/t) sum of t copies of
// e^{-L}); the trailing -ln is decreasing, so the exp-sum is convolved with
// the flipped rounding direction.
inline DiscretePld rand_alloc_add(const PldSource& source, int64_t t,
                                  const TightnessParams& params,
                                  BoundDirection dir) {
  params.require_positive_alpha("rand_alloc_add");
  if (t < 1) throw InvalidArgumentError("rand_alloc_add: t must be >= 1");
  if (t == 1) return discretize(source, params, dir);
  const auto grid = detail::alloc_grid_params(t, params);
  const TightnessParams step_params(grid.alpha_prime, grid.beta_prime);
  const BoundDirection inner = flipped(dir);

  DiscretePld l1 = discretize(source, step_params, dir);
  GeometricGridDist u = to_exp_grid(l1, /*negate=*/true, grid.alpha_prime);
  GeometricGridDist z = self_conv(u, t, inner, grid.beta_prime);

  auto atoms = detail::log_scaled_atoms(z, t);
  for (auto& [value, mass] : atoms) value = -value;
  std::reverse(atoms.begin(), atoms.end());
  // Negation swaps the roles of the infinite atoms: exp-sums at 0 map to
  // +inf losses, exp-sums at +inf map to -inf.
  return DiscretePld::from_atoms(std::move(atoms), z.p_top, z.p_zero);
}

// k-out-of-t allocation via the reduction to a k-fold composition of
// 1-out-of-floor(t/k) allocations, with the budget split evenly between the
// allocation stage and the composition stage. Returns (remove, add) bounds.
inline std::pair<DiscretePld, DiscretePld> rand_alloc_k(
    const PldSource& source_rem, const PldSource& source_add,
    const AllocationParams& alloc, BoundDirection dir) {
  alloc.validate();
  const TightnessParams half(alloc.tightness.alpha / 2.0,
                             alloc.tightness.beta / 2.0);
  const int64_t t_single = alloc.t / alloc.k;
  DiscretePld rem = rand_alloc_remove(source_rem, t_single, half, dir);
  DiscretePld add = rand_alloc_add(source_add, t_single, half, dir);
  if (alloc.k == 1) return {std::move(rem), std::move(add)};
  DiscretePld rem_k =
      self_compose(rem, alloc.k, half.alpha, dir, /*trunc_beta=*/half.beta);
  DiscretePld add_k =
      self_compose(add, alloc.k, half.alpha, dir, /*trunc_beta=*/half.beta);
  return {std::move(rem_k), std::move(add_k)};
}

}  // namespace pld
