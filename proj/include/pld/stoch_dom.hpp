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
#include <vector>

#include "pld/discrete_pld.hpp"
#include "pld/kahan.hpp"
#include "pld/types.hpp"

namespace pld {

namespace detail {

// Suffix masses: suffix[i] = sum of probs[i..n-1]; suffix[n] = 0.
inline std::vector<double> suffix_masses(const std::vector<double>& probs) {
  std::vector<double> suffix(probs.size() + 1, 0.0);
  KahanSum acc;
  for (size_t i = probs.size(); i-- > 0;) {
    acc.add(probs[i]);
    suffix[i] = acc.value();
  }
  return suffix;
}

// Support values within kValueTie (relative) are treated as the same point;
// distinct computation paths to the same mathematical atom may differ by a
// few ulps.
inline double value_tie(double x) {
  return tol::kValueTie * std::max(1.0, std::abs(x));
}

}  // namespace detail

// Tests whether U (alpha, beta)-approximately stochastically dominates V:
// for all x, ccdf_V(x) <= ccdf_U(x - alpha) + beta, evaluated as an exact
// step-function comparison on the merged support plus both infinities,
// within CCDF slack `slack`.
inline bool check_stoch_dom(const DiscretePld& V, const DiscretePld& U,
                            const TightnessParams& params,
                            double slack = tol::kCcdfSlack) {
  const double alpha = params.alpha;
  const double beta = params.beta;

  // x = +inf: only the +inf atoms survive.
  if (V.p_top() > U.p_top() + beta + slack) return false;
  // x = -inf: everything above -inf.
  if (1.0 - V.p_bottom() > 1.0 - U.p_bottom() + beta + slack) return false;

  const auto& vv = V.values();
  const auto& uv = U.values();
  const std::vector<double> vs = detail::suffix_masses(V.probs());
  const std::vector<double> us = detail::suffix_masses(U.probs());

  // Mass strictly above x; atoms within a tie of x count as exactly at x
  // and are excluded on both sides, so atoms that are mathematically equal
  // but reached by different floating paths compare consistently.
  auto ccdf_v = [&](double x) {
    size_t i = std::upper_bound(vv.begin(), vv.end(), x + detail::value_tie(x)) -
               vv.begin();
    return vs[i] + V.p_top();
  };
  auto ccdf_u = [&](double y) {
    size_t i = std::upper_bound(uv.begin(), uv.end(), y + detail::value_tie(y)) -
               uv.begin();
    return us[i] + U.p_top();
  };

  auto holds_at = [&](double x) {
    return ccdf_v(x) <= ccdf_u(x - alpha) + beta + slack;
  };
  for (double x : vv) {
    if (!holds_at(x)) return false;
  }
  for (double u : uv) {
    if (!holds_at(u + alpha)) return false;
  }
  return true;
}

// CCDF-pointwise fusion of two bounds on the same target: the pointwise min
// of the CCDFs for upper bounds, the pointwise max for lower bounds. The
// result still bounds the target in the same direction and is at least as
// tight as either input.
inline DiscretePld combine_bounds(const DiscretePld& A, const DiscretePld& B,
                                  BoundDirection dir) {
  const bool upper = dir == BoundDirection::kUpper;
  std::vector<double> merged;
  merged.reserve(A.size() + B.size());
  std::merge(A.values().begin(), A.values().end(), B.values().begin(),
             B.values().end(), std::back_inserter(merged));
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());

  const std::vector<double> as = detail::suffix_masses(A.probs());
  const std::vector<double> bs = detail::suffix_masses(B.probs());
  auto ccdf = [](const std::vector<double>& values,
                 const std::vector<double>& suffix, double p_top, double x) {
    size_t i =
        std::upper_bound(values.begin(), values.end(), x) - values.begin();
    return suffix[i] + p_top;
  };

  double p_bottom =
      upper ? std::max(A.p_bottom(), B.p_bottom()) : std::min(A.p_bottom(), B.p_bottom());
  double prev = 1.0 - p_bottom;
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(merged.size());
  double last = prev;
  for (double x : merged) {
    double ca = ccdf(A.values(), as, A.p_top(), x);
    double cb = ccdf(B.values(), bs, B.p_top(), x);
    double c = upper ? std::min(ca, cb) : std::max(ca, cb);
    double mass = last - c;
    if (mass > 0.0) atoms.emplace_back(x, mass);
    last = c;
  }
  return DiscretePld::from_atoms(std::move(atoms), p_bottom, last);
}

}  // namespace pld
