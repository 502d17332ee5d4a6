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
#include <utility>
#include <vector>

#include "pld/discrete_pld.hpp"
#include "pld/errors.hpp"
#include "pld/types.hpp"

namespace pld {

namespace detail {

// ln(1 + lambda (e^l - 1)), the loss value of the subsampled mixture pair on
// the region where the base loss is l. Branch on the sign of l to stay
// accurate for large |l|.
inline double subsample_loss(double l, const SamplingRate& rate) {
  if (l >= 0.0) {
    return l + std::log(rate.lambda + rate.one_minus_lambda * std::exp(-l));
  }
  return std::log1p(rate.lambda * std::expm1(l));
}

inline void require_realization(const DiscretePld& L, const char* op) {
  if (!L.is_realization()) {
    throw InvalidRealizationError(std::string(op) +
                                  ": input is not a realization");
  }
}

}  // namespace detail

// Poisson-subsampling transform on a realization, remove direction: the
// loss of (lambda P + (1-lambda) Q, Q) given the loss of (P, Q). Exact on
// discrete inputs. The atom at each transformed value carries
// lambda f(l) + (1-lambda) f(l) e^{-l}; the leftover Q-only weight
// (1-lambda)(1 - E[e^-L]) sits at the minimum possible value ln(1-lambda).
inline DiscretePld subsample_remove(const DiscretePld& L,
                                    const SamplingRate& rate) {
  detail::require_realization(L, "subsample_remove");
  if (rate.lambda == 0.0) return DiscretePld::point_mass(0.0);
  if (rate.lambda == 1.0) return L;

  const auto& values = L.values();
  const auto& probs = L.probs();
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(values.size() + 1);
  KahanSum nem;
  for (size_t i = 0; i < values.size(); ++i) {
    if (probs[i] == 0.0) continue;
    double l = values[i];
    double dual_weight =
        -l > 700.0 ? std::exp(std::log(probs[i]) - l) : probs[i] * std::exp(-l);
    nem.add(dual_weight);
    atoms.emplace_back(detail::subsample_loss(l, rate),
                       rate.lambda * probs[i] +
                           rate.one_minus_lambda * dual_weight);
  }
  double residual = rate.one_minus_lambda * (1.0 - nem.value());
  if (residual > 0.0) {
    atoms.emplace_back(std::log(rate.one_minus_lambda), residual);
  }
  return DiscretePld::from_atoms(std::move(atoms), 0.0,
                                 rate.lambda * L.p_top());
}

// Add direction: the loss of (Q, lambda P + (1-lambda) Q) given the loss of
// (Q, P). Values map through -ln(1 + lambda (e^{-l} - 1)) with unchanged
// masses; the +inf atom lands on the maximal possible value -ln(1-lambda).
inline DiscretePld subsample_add(const DiscretePld& L,
                                 const SamplingRate& rate) {
  detail::require_realization(L, "subsample_add");
  if (rate.lambda == 1.0) return L;
  if (rate.lambda == 0.0) return DiscretePld::point_mass(0.0);

  const auto& values = L.values();
  const auto& probs = L.probs();
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(values.size() + 1);
  for (size_t i = 0; i < values.size(); ++i) {
    if (probs[i] == 0.0) continue;
    atoms.emplace_back(-detail::subsample_loss(-values[i], rate), probs[i]);
  }
  if (L.p_top() > 0.0) {
    atoms.emplace_back(-std::log(rate.one_minus_lambda), L.p_top());
  }
  return DiscretePld::from_atoms(std::move(atoms), 0.0, 0.0);
}

}  // namespace pld
