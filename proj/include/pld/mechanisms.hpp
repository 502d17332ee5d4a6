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
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pld/discrete_pld.hpp"
#include "pld/errors.hpp"
#include "pld/kahan.hpp"
#include "pld/normal.hpp"
#include "pld/source.hpp"
#include "pld/types.hpp"

namespace pld {

// Gaussian noise addition with sensitivity fixed at 1; callers rescale
// sigma for other sensitivities.
struct GaussianMechanism {
  double sigma = 1.0;

  GaussianMechanism() = default;
  explicit GaussianMechanism(double sigma_in) : sigma(sigma_in) {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
      throw InvalidArgumentError("GaussianMechanism: sigma must be positive");
    }
  }
};

// Loss distribution of the Gaussian pair: N(1/(2 sigma^2), 1/sigma^2).
// The pair is symmetric, so the source is its own dual and serves both
// adjacency directions.
class GaussianPldSource final : public PldSource {
 public:
  explicit GaussianPldSource(double sigma)
      : sigma_(sigma),
        mean_(1.0 / (2.0 * sigma * sigma)),
        scale_(1.0 / sigma) {}

  double cdf(double x) const override { return norm_cdf((x - mean_) / scale_); }
  double sf(double x) const override { return norm_sf((x - mean_) / scale_); }
  double quantile(double a) const override {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw OutOfRangeError("quantile: level outside [0, 1]");
    }
    return mean_ + scale_ * norm_quantile(a);
  }
  double finite_support_min() const override {
    return -std::numeric_limits<double>::infinity();
  }
  double finite_support_max() const override {
    return std::numeric_limits<double>::infinity();
  }
  std::unique_ptr<PldSource> dual_source() const override {
    return std::make_unique<GaussianPldSource>(sigma_);
  }
  std::unique_ptr<PldSource> clone() const override {
    return std::make_unique<GaussianPldSource>(sigma_);
  }
  std::string description() const override {
    return "gaussian-pld(sigma=" + std::to_string(sigma_) + ")";
  }

  double sigma() const { return sigma_; }

 private:
  double sigma_;
  double mean_;
  double scale_;
};

inline std::unique_ptr<PldSource> gaussian_pld_source(
    const GaussianMechanism& mech, AdjacencyDirection /*adj*/) {
  return std::make_unique<GaussianPldSource>(mech.sigma);
}

// A finite dominating pair of distributions (P, Q) over a shared outcome
// alphabet; input to exact oracles and PLD construction.
struct DiscretePair {
  std::vector<double> p;
  std::vector<double> q;

  DiscretePair() = default;
  DiscretePair(std::vector<double> p_in, std::vector<double> q_in)
      : p(std::move(p_in)), q(std::move(q_in)) {
    validate();
  }

  void validate() const {
    if (p.size() != q.size() || p.empty()) {
      throw InvalidDistributionError(
          "DiscretePair: p and q must be non-empty and equal length");
    }
    KahanSum sp, sq;
    for (size_t i = 0; i < p.size(); ++i) {
      if (!(p[i] >= 0.0) || !(q[i] >= 0.0)) {
        throw InvalidDistributionError("DiscretePair: negative mass");
      }
      sp.add(p[i]);
      sq.add(q[i]);
    }
    if (std::abs(sp.value() - 1.0) > 1e-12 ||
        std::abs(sq.value() - 1.0) > 1e-12) {
      throw InvalidDistributionError("DiscretePair: masses must sum to 1");
    }
  }

  DiscretePair swapped() const { return DiscretePair(q, p); }
};

// Exact PLD of a finite pair. Remove direction: ln(P/Q) under P; add
// direction: ln(Q/P) under Q. Outcomes with zero numerator mass never get
// sampled and contribute nothing; outcomes with zero denominator contribute
// to the +inf atom. Equal losses are grouped by exact floating equality
// (duplicates only arise from genuinely equal ratios on small alphabets).
inline DiscretePld discrete_pair_pld(const DiscretePair& pair,
                                     AdjacencyDirection adj) {
  pair.validate();
  const std::vector<double>& num =
      adj == AdjacencyDirection::kRemove ? pair.p : pair.q;
  const std::vector<double>& den =
      adj == AdjacencyDirection::kRemove ? pair.q : pair.p;
  std::vector<std::pair<double, double>> atoms;
  atoms.reserve(num.size());
  double p_top = 0.0;
  for (size_t i = 0; i < num.size(); ++i) {
    if (num[i] == 0.0) continue;
    if (den[i] == 0.0) {
      p_top += num[i];
    } else {
      atoms.emplace_back(std::log(num[i] / den[i]), num[i]);
    }
  }
  return DiscretePld::from_atoms(std::move(atoms), 0.0, p_top);
}

}  // namespace pld
