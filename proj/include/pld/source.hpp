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
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "pld/discrete_pld.hpp"
#include "pld/errors.hpp"

namespace pld {

// A continuous or discrete loss-distribution provider. Feeds discretization
// and the allocation transform. cdf is nondecreasing and right-continuous;
// quantile is its generalized inverse (smallest support value v with
// F(v) >= a). Sources may carry mass at +-inf (discrete ones).
class PldSource {
 public:
  virtual ~PldSource() = default;

  virtual double cdf(double x) const = 0;
  // F(x^-) = P(X < x); coincides with cdf for continuous sources.
  virtual double cdf_left(double x) const { return cdf(x); }
  // P(X > x); override when 1 - cdf(x) would cancel.
  virtual double sf(double x) const { return 1.0 - cdf(x); }
  // P(X >= x).
  virtual double sf_left(double x) const { return 1.0 - cdf_left(x); }

  virtual double quantile(double a) const = 0;

  virtual double p_top() const { return 0.0; }
  virtual double p_bottom() const { return 0.0; }
  // Bounds of the finite support; +-inf for unbounded sources.
  virtual double finite_support_min() const = 0;
  virtual double finite_support_max() const = 0;

  // Source of the dual loss distribution (roles of the underlying pair
  // swapped). Needed by lower-bound allocation transforms.
  virtual std::unique_ptr<PldSource> dual_source() const = 0;

  virtual std::unique_ptr<PldSource> clone() const = 0;
  virtual std::string description() const = 0;
};

// Wraps a DiscretePld as a source with exact CDF/quantile queries.
class DiscretePldSource final : public PldSource {
 public:
  explicit DiscretePldSource(DiscretePld pld) : pld_(std::move(pld)) {
    const auto& probs = pld_.probs();
    prefix_.resize(probs.size() + 1, 0.0);
    KahanSum acc;
    for (size_t i = 0; i < probs.size(); ++i) {
      acc.add(probs[i]);
      prefix_[i + 1] = acc.value();
    }
    suffix_ = detail_suffix(probs);
  }

  double cdf(double x) const override {
    size_t i = std::upper_bound(pld_.values().begin(), pld_.values().end(), x) -
               pld_.values().begin();
    return pld_.p_bottom() + prefix_[i];
  }
  double cdf_left(double x) const override {
    size_t i = std::lower_bound(pld_.values().begin(), pld_.values().end(), x) -
               pld_.values().begin();
    return pld_.p_bottom() + prefix_[i];
  }
  double sf(double x) const override {
    size_t i = std::upper_bound(pld_.values().begin(), pld_.values().end(), x) -
               pld_.values().begin();
    return pld_.p_top() + suffix_[i];
  }
  double sf_left(double x) const override {
    size_t i = std::lower_bound(pld_.values().begin(), pld_.values().end(), x) -
               pld_.values().begin();
    return pld_.p_top() + suffix_[i];
  }

  double quantile(double a) const override {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw OutOfRangeError("quantile: level outside [0, 1]");
    }
    if (pld_.p_bottom() > 0.0 && a <= pld_.p_bottom()) {
      return -std::numeric_limits<double>::infinity();
    }
    // Smallest index with p_bottom + prefix[i + 1] >= a.
    double target = a - pld_.p_bottom();
    size_t i = std::lower_bound(prefix_.begin() + 1, prefix_.end(), target) -
               (prefix_.begin() + 1);
    if (i >= pld_.size()) {
      if (pld_.p_top() > 0.0) return std::numeric_limits<double>::infinity();
      return pld_.values().empty() ? std::numeric_limits<double>::quiet_NaN()
                                   : pld_.values().back();
    }
    return pld_.values()[i];
  }

  double p_top() const override { return pld_.p_top(); }
  double p_bottom() const override { return pld_.p_bottom(); }
  double finite_support_min() const override {
    return pld_.values().empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : pld_.values().front();
  }
  double finite_support_max() const override {
    return pld_.values().empty() ? std::numeric_limits<double>::quiet_NaN()
                                 : pld_.values().back();
  }

  std::unique_ptr<PldSource> dual_source() const override {
    return std::make_unique<DiscretePldSource>(pld_dual(pld_));
  }
  std::unique_ptr<PldSource> clone() const override {
    return std::make_unique<DiscretePldSource>(pld_);
  }
  std::string description() const override { return "discrete-pld"; }

  const DiscretePld& pld() const { return pld_; }

 private:
  static std::vector<double> detail_suffix(const std::vector<double>& probs) {
    std::vector<double> suffix(probs.size() + 1, 0.0);
    KahanSum acc;
    for (size_t i = probs.size(); i-- > 0;) {
      acc.add(probs[i]);
      suffix[i] = acc.value();
    }
    return suffix;
  }

  DiscretePld pld_;
  std::vector<double> prefix_;
  std::vector<double> suffix_;
};

}  // namespace pld
