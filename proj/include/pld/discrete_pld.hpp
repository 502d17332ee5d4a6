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
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "pld/errors.hpp"
#include "pld/kahan.hpp"
#include "pld/types.hpp"

namespace pld {

// A discrete random variable over [-inf, +inf] representing (a bound on) a
// privacy loss distribution. Values are strictly increasing and finite;
// masses at -inf and +inf live in p_bottom / p_top. Immutable once built.
//
// Objects produced by upper-bound transforms satisfy the realization
// predicate (p_bottom == 0 and E[e^-L] <= 1); lower-bound objects may carry
// p_bottom, which is why the predicate is checked on demand rather than
// enforced at construction.
class DiscretePld {
 public:
  DiscretePld(std::vector<double> values, std::vector<double> probs,
              double p_bottom, double p_top)
      : values_(std::move(values)),
        probs_(std::move(probs)),
        p_bottom_(p_bottom),
        p_top_(p_top) {
    validate();
  }

  // Builds from possibly unsorted atoms, merging exactly-equal values and
  // dropping zero-mass atoms.
  static DiscretePld from_atoms(std::vector<std::pair<double, double>> atoms,
                                double p_bottom, double p_top) {
    std::sort(atoms.begin(), atoms.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<double> values;
    std::vector<double> probs;
    values.reserve(atoms.size());
    probs.reserve(atoms.size());
    for (const auto& [v, p] : atoms) {
      if (p == 0.0) continue;
      if (!values.empty() && values.back() == v) {
        probs.back() += p;
      } else {
        values.push_back(v);
        probs.push_back(p);
      }
    }
    return DiscretePld(std::move(values), std::move(probs), p_bottom, p_top);
  }

  static DiscretePld point_mass(double v) {
    return DiscretePld({v}, {1.0}, 0.0, 0.0);
  }

  const std::vector<double>& values() const { return values_; }
  const std::vector<double>& probs() const { return probs_; }
  double p_bottom() const { return p_bottom_; }
  double p_top() const { return p_top_; }
  size_t size() const { return values_.size(); }

  double total_mass() const {
    KahanSum acc;
    acc.add(p_bottom_);
    acc.add(p_top_);
    for (double p : probs_) acc.add(p);
    return acc.value();
  }

  // Finite-part negative exponential moment, sum p_i * e^{-v_i}; the +inf
  // atom contributes nothing.
  double finite_neg_exp_moment() const {
    KahanSum acc;
    for (size_t i = 0; i < values_.size(); ++i) {
      if (probs_[i] > 0.0) acc.add(probs_[i] * std::exp(-values_[i]));
    }
    return acc.value();
  }

  bool is_realization() const {
    return p_bottom_ == 0.0 && finite_neg_exp_moment() <= 1.0 + tol::kMass;
  }

  // Copy without zero-mass atoms (grids keep them; serialized or composed
  // objects usually do not need them).
  DiscretePld without_zero_atoms() const {
    std::vector<double> values;
    std::vector<double> probs;
    for (size_t i = 0; i < values_.size(); ++i) {
      if (probs_[i] > 0.0) {
        values.push_back(values_[i]);
        probs.push_back(probs_[i]);
      }
    }
    return DiscretePld(std::move(values), std::move(probs), p_bottom_, p_top_);
  }

 private:
  void validate() {
    if (values_.size() != probs_.size()) {
      throw InvalidArgumentError("DiscretePld: values/probs length mismatch");
    }
    for (size_t i = 0; i < values_.size(); ++i) {
      if (!std::isfinite(values_[i])) {
        throw InvalidArgumentError("DiscretePld: values must be finite");
      }
      if (i > 0 && !(values_[i] > values_[i - 1])) {
        throw InvalidArgumentError(
            "DiscretePld: values must be strictly increasing");
      }
      probs_[i] = clamp_mass(probs_[i], "atom mass");
    }
    p_bottom_ = clamp_mass(p_bottom_, "p_bottom");
    p_top_ = clamp_mass(p_top_, "p_top");
    double total = total_mass();
    if (std::abs(total - 1.0) > tol::kMass) {
      throw InvalidArgumentError("DiscretePld: total mass " +
                                 std::to_string(total) + " is not 1");
    }
  }

  // Tiny negative masses from floating cancellation are clamped to zero;
  // anything materially negative is an error.
  static double clamp_mass(double p, const char* what) {
    if (p < 0.0) {
      if (p < -tol::kMass) {
        throw InvalidArgumentError(std::string("DiscretePld: negative ") +
                                   what);
      }
      return 0.0;
    }
    if (!std::isfinite(p)) {
      throw InvalidArgumentError(std::string("DiscretePld: non-finite ") +
                                 what);
    }
    return p;
  }

  std::vector<double> values_;
  std::vector<double> probs_;
  double p_bottom_ = 0.0;
  double p_top_ = 0.0;
};

// E[e^-L] of a realization. The +inf atom contributes 0.
inline double neg_exp_moment(const DiscretePld& L) {
  if (L.p_bottom() > 0.0) {
    throw InvalidRealizationError(
        "neg_exp_moment: input carries mass at -inf");
  }
  return L.finite_neg_exp_moment();
}

// The loss distribution with the roles of the two underlying distributions
// swapped: value -l with mass f(l) * e^{-l}, plus an atom at +inf holding
// 1 - E[e^-L]. The input's own +inf atom has zero weight in the dual.
inline DiscretePld pld_dual(const DiscretePld& L) {
  if (!L.is_realization()) {
    throw InvalidRealizationError("pld_dual: input is not a realization");
  }
  const auto& values = L.values();
  const auto& probs = L.probs();
  const size_t n = values.size();
  std::vector<double> dual_values(n);
  std::vector<double> dual_probs(n);
  KahanSum finite_mass;
  for (size_t i = 0; i < n; ++i) {
    size_t j = n - 1 - i;  // reverse so the output is increasing
    dual_values[i] = -values[j];
    dual_probs[i] = probs[j] * std::exp(-values[j]);
    finite_mass.add(dual_probs[i]);
  }
  double p_top = 1.0 - finite_mass.value();
  if (p_top < 0.0) p_top = 0.0;  // realization slack
  return DiscretePld(std::move(dual_values), std::move(dual_probs), 0.0,
                     p_top);
}

}  // namespace pld
