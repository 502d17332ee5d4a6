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
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pld/allocation.hpp"
#include "pld/compose.hpp"
#include "pld/discrete_pld.hpp"
#include "pld/discretize.hpp"
#include "pld/errors.hpp"
#include "pld/hockey_stick.hpp"
#include "pld/mechanisms.hpp"
#include "pld/source.hpp"
#include "pld/subsample.hpp"
#include "pld/types.hpp"

namespace pld {

// One stage of an accounting pipeline. The first stage is always a
// mechanism (gaussian or pair); the remaining stages transform the tracked
// loss distributions.
struct PipelineStage {
  enum class Type { kGaussian, kPair, kAllocate, kSubsample, kCompose };
  Type type = Type::kGaussian;
  double sigma = 1.0;              // kGaussian
  std::optional<DiscretePair> pair;  // kPair
  int64_t t = 1, k = 1;            // kAllocate
  double rate = 1.0;               // kSubsample
  int64_t count = 1;               // kCompose

  static PipelineStage gaussian(double sigma) {
    PipelineStage s;
    s.type = Type::kGaussian;
    s.sigma = sigma;
    return s;
  }
  static PipelineStage from_pair(DiscretePair pair) {
    PipelineStage s;
    s.type = Type::kPair;
    s.pair = std::move(pair);
    return s;
  }
  static PipelineStage allocate(int64_t t, int64_t k) {
    PipelineStage s;
    s.type = Type::kAllocate;
    s.t = t;
    s.k = k;
    return s;
  }
  static PipelineStage subsample(double rate) {
    PipelineStage s;
    s.type = Type::kSubsample;
    s.rate = rate;
    return s;
  }
  static PipelineStage compose(int64_t count) {
    PipelineStage s;
    s.type = Type::kCompose;
    s.count = count;
    return s;
  }

  std::string name() const {
    switch (type) {
      case Type::kGaussian: return "gaussian";
      case Type::kPair: return "pair";
      case Type::kAllocate: return "allocate";
      case Type::kSubsample: return "subsample";
      case Type::kCompose: return "compose";
    }
    return "?";
  }
};

// An ordered accounting pipeline with a global tightness budget and the
// epsilon/delta query lists.
struct PipelineSpec {
  std::vector<PipelineStage> stages;
  TightnessParams tightness;
  std::vector<double> epsilons;  // query delta(epsilon)
  std::vector<double> deltas;    // query epsilon(delta)
  bool compute_lower = false;
  bool remove_direction = true;
  bool add_direction = true;

  void validate() const {
    if (stages.empty()) {
      throw InvalidArgumentError("PipelineSpec: at least one stage required");
    }
    if (stages[0].type != PipelineStage::Type::kGaussian &&
        stages[0].type != PipelineStage::Type::kPair) {
      throw InvalidArgumentError(
          "PipelineSpec: first stage must be a mechanism (gaussian or pair)");
    }
    for (size_t i = 1; i < stages.size(); ++i) {
      auto t = stages[i].type;
      if (t == PipelineStage::Type::kGaussian ||
          t == PipelineStage::Type::kPair) {
        throw InvalidArgumentError(
            "PipelineSpec: mechanism allowed only as the first stage");
      }
      if (t == PipelineStage::Type::kAllocate && i != 1) {
        throw InvalidArgumentError(
            "PipelineSpec: allocate must immediately follow the mechanism");
      }
    }
    if (!remove_direction && !add_direction) {
      throw InvalidArgumentError("PipelineSpec: no direction selected");
    }
    tightness.validate();
  }
};

struct CurveRow {
  double epsilon;
  double delta_upper;
  std::optional<double> delta_lower;
  std::string direction;  // "remove", "add" or "both"
};

struct EpsilonRow {
  double delta;
  std::optional<double> eps_upper;  // empty when the query is out of range
  std::optional<double> eps_lower;
  std::string direction;
};

struct PipelineReport {
  std::optional<DiscretePld> remove_upper, add_upper;
  std::optional<DiscretePld> remove_lower, add_lower;
  std::vector<CurveRow> curve;
  std::vector<EpsilonRow> epsilon_rows;
};

namespace detail {

struct Lane {
  std::optional<DiscretePld> pld;
  AdjacencyDirection adj;
  BoundDirection bound;
};

inline void rethrow_with_stage(size_t index, const std::string& name,
                               const Error& e) {
  throw Error("stage " + std::to_string(index) + " (" + name +
              "): " + e.what());
}

}  // namespace detail

// Evaluates the pipeline in the requested adjacency directions for upper
// (and optionally lower) bounds, then answers the epsilon/delta queries as
// the max over directions. The global budget is split evenly across the
// stages that consume it: allocation, composition, and the mechanism's own
// discretization when a later stage needs a discrete object up front.
// Subsampling is exact on discrete inputs and consumes none.
inline PipelineReport run_pipeline(const PipelineSpec& spec) {
  spec.validate();

  // Budget consumers.
  int consumers = 0;
  bool mechanism_needs_grid = false;
  if (spec.stages.size() > 1 &&
      spec.stages[1].type != PipelineStage::Type::kAllocate) {
    // A gaussian mechanism followed by subsample/compose has to be put on a
    // grid first; pair mechanisms are already exact and discrete.
    mechanism_needs_grid = spec.stages[0].type == PipelineStage::Type::kGaussian;
  }
  if (spec.stages.size() == 1 &&
      spec.stages[0].type == PipelineStage::Type::kGaussian) {
    mechanism_needs_grid = true;
  }
  if (mechanism_needs_grid) ++consumers;
  for (const auto& stage : spec.stages) {
    if (stage.type == PipelineStage::Type::kAllocate ||
        stage.type == PipelineStage::Type::kCompose) {
      ++consumers;
    }
  }
  if (consumers == 0) consumers = 1;
  const TightnessParams stage_budget(
      spec.tightness.alpha / static_cast<double>(consumers),
      spec.tightness.beta / static_cast<double>(consumers));

  // Mechanism sources per adjacency direction.
  std::unique_ptr<PldSource> src_rem, src_add;
  const auto& mech = spec.stages[0];
  if (mech.type == PipelineStage::Type::kGaussian) {
    GaussianMechanism g(mech.sigma);
    src_rem = gaussian_pld_source(g, AdjacencyDirection::kRemove);
    src_add = gaussian_pld_source(g, AdjacencyDirection::kAdd);
  } else {
    src_rem = std::make_unique<DiscretePldSource>(
        discrete_pair_pld(*mech.pair, AdjacencyDirection::kRemove));
    src_add = std::make_unique<DiscretePldSource>(
        discrete_pair_pld(*mech.pair, AdjacencyDirection::kAdd));
  }

  std::vector<detail::Lane> lanes;
  for (auto adj : {AdjacencyDirection::kRemove, AdjacencyDirection::kAdd}) {
    if (adj == AdjacencyDirection::kRemove && !spec.remove_direction) continue;
    if (adj == AdjacencyDirection::kAdd && !spec.add_direction) continue;
    lanes.push_back({std::nullopt, adj, BoundDirection::kUpper});
    if (spec.compute_lower) {
      lanes.push_back({std::nullopt, adj, BoundDirection::kLower});
    }
  }

  // Seed each lane: either the allocate stage consumes the source directly,
  // or the mechanism is materialized as a discrete PLD.
  size_t first_transform = 1;
  const bool alloc_first = spec.stages.size() > 1 &&
                           spec.stages[1].type == PipelineStage::Type::kAllocate;
  for (auto& lane : lanes) {
    const PldSource& src =
        lane.adj == AdjacencyDirection::kRemove ? *src_rem : *src_add;
    try {
      if (alloc_first) {
        const auto& st = spec.stages[1];
        AllocationParams params(st.t, st.k, stage_budget);
        if (lane.adj == AdjacencyDirection::kRemove) {
          lane.pld = rand_alloc_k(src, *src_add, params, lane.bound).first;
        } else {
          lane.pld = rand_alloc_k(*src_rem, src, params, lane.bound).second;
        }
      } else if (mech.type == PipelineStage::Type::kPair) {
        lane.pld = dynamic_cast<const DiscretePldSource&>(src).pld();
      } else {
        lane.pld = discretize(src, stage_budget, lane.bound);
      }
    } catch (const Error& e) {
      detail::rethrow_with_stage(alloc_first ? 1 : 0,
                                 alloc_first ? "allocate" : mech.name(), e);
    }
  }
  if (alloc_first) first_transform = 2;

  for (size_t i = first_transform; i < spec.stages.size(); ++i) {
    const auto& stage = spec.stages[i];
    for (auto& lane : lanes) {
      try {
        switch (stage.type) {
          case PipelineStage::Type::kSubsample: {
            SamplingRate rate(stage.rate);
            if (lane.bound == BoundDirection::kLower &&
                !lane.pld->is_realization()) {
              throw InvalidRealizationError(
                  "subsampling a lower bound is only defined while it is "
                  "still a realization; request upper bounds instead");
            }
            lane.pld = lane.adj == AdjacencyDirection::kRemove
                           ? subsample_remove(*lane.pld, rate)
                           : subsample_add(*lane.pld, rate);
            break;
          }
          case PipelineStage::Type::kCompose:
            lane.pld = self_compose(*lane.pld, stage.count, stage_budget.alpha,
                                    lane.bound, stage_budget.beta);
            break;
          default:
            throw InvalidArgumentError("unexpected stage");
        }
      } catch (const Error& e) {
        detail::rethrow_with_stage(i, stage.name(), e);
      }
    }
  }

  PipelineReport report;
  auto lane_pld = [&](AdjacencyDirection adj,
                      BoundDirection bound) -> std::optional<DiscretePld> {
    for (const auto& lane : lanes) {
      if (lane.adj == adj && lane.bound == bound) return lane.pld;
    }
    return std::nullopt;
  };
  report.remove_upper =
      lane_pld(AdjacencyDirection::kRemove, BoundDirection::kUpper);
  report.add_upper = lane_pld(AdjacencyDirection::kAdd, BoundDirection::kUpper);
  report.remove_lower =
      lane_pld(AdjacencyDirection::kRemove, BoundDirection::kLower);
  report.add_lower = lane_pld(AdjacencyDirection::kAdd, BoundDirection::kLower);

  auto max_delta = [](const std::optional<DiscretePld>& a,
                      const std::optional<DiscretePld>& b,
                      double eps) -> std::optional<double> {
    std::optional<double> out;
    if (a) out = hockey_stick_delta(*a, eps);
    if (b) {
      double d = hockey_stick_delta(*b, eps);
      out = out ? std::max(*out, d) : d;
    }
    return out;
  };
  for (double eps : spec.epsilons) {
    if (report.remove_upper) {
      report.curve.push_back({eps,
                              hockey_stick_delta(*report.remove_upper, eps),
                              report.remove_lower
                                  ? std::optional<double>(hockey_stick_delta(
                                        *report.remove_lower, eps))
                                  : std::nullopt,
                              "remove"});
    }
    if (report.add_upper) {
      report.curve.push_back(
          {eps, hockey_stick_delta(*report.add_upper, eps),
           report.add_lower ? std::optional<double>(hockey_stick_delta(
                                  *report.add_lower, eps))
                            : std::nullopt,
           "add"});
    }
    auto up = max_delta(report.remove_upper, report.add_upper, eps);
    if (up) {
      report.curve.push_back(
          {eps, *up, max_delta(report.remove_lower, report.add_lower, eps),
           "both"});
    }
  }

  auto max_epsilon = [](const std::optional<DiscretePld>& a,
                        const std::optional<DiscretePld>& b,
                        double delta) -> std::optional<double> {
    std::optional<double> out;
    if (a) out = epsilon_for_delta(*a, delta);
    if (b) {
      double e = epsilon_for_delta(*b, delta);
      out = out ? std::max(*out, e) : e;
    }
    return out;
  };
  for (double delta : spec.deltas) {
    try {
      EpsilonRow row{delta, max_epsilon(report.remove_upper, report.add_upper,
                                        delta),
                     report.remove_lower || report.add_lower
                         ? max_epsilon(report.remove_lower, report.add_lower,
                                       delta)
                         : std::nullopt,
                     "both"};
      report.epsilon_rows.push_back(std::move(row));
    } catch (const OutOfRangeError&) {
      report.epsilon_rows.push_back({delta, std::nullopt, std::nullopt,
                                     "both"});
    }
  }
  return report;
}

struct PoissonComparison {
  double delta;
  double eps_alloc_upper;
  double eps_alloc_lower;
  double eps_poisson;
  double eps_alloc_upper_remove, eps_alloc_upper_add;
  double eps_poisson_remove, eps_poisson_add;
};

// Allocation vs. the Poisson baseline at matched expected participation:
// k-out-of-t allocation against rate-(k/t) subsampling composed t times,
// both as upper bounds (plus the allocation lower bound), all at the same
// global budget. Epsilons are privacy-profile values (max over adjacency
// directions) at the given delta.
inline PoissonComparison compare_poisson(double sigma, int64_t t, int64_t k,
                                         const TightnessParams& params,
                                         double delta) {
  PipelineSpec alloc_spec;
  alloc_spec.stages = {PipelineStage::gaussian(sigma),
                       PipelineStage::allocate(t, k)};
  alloc_spec.tightness = params;
  alloc_spec.deltas = {delta};
  alloc_spec.compute_lower = true;
  PipelineReport alloc = run_pipeline(alloc_spec);

  PipelineSpec poisson_spec;
  poisson_spec.stages = {
      PipelineStage::gaussian(sigma),
      PipelineStage::subsample(static_cast<double>(k) /
                               static_cast<double>(t)),
      PipelineStage::compose(t)};
  poisson_spec.tightness = params;
  poisson_spec.deltas = {delta};
  PipelineReport poisson = run_pipeline(poisson_spec);

  PoissonComparison cmp{};
  cmp.delta = delta;
  cmp.eps_alloc_upper = *alloc.epsilon_rows[0].eps_upper;
  cmp.eps_alloc_lower = *alloc.epsilon_rows[0].eps_lower;
  cmp.eps_poisson = *poisson.epsilon_rows[0].eps_upper;
  cmp.eps_alloc_upper_remove = epsilon_for_delta(*alloc.remove_upper, delta);
  cmp.eps_alloc_upper_add = epsilon_for_delta(*alloc.add_upper, delta);
  cmp.eps_poisson_remove = epsilon_for_delta(*poisson.remove_upper, delta);
  cmp.eps_poisson_add = epsilon_for_delta(*poisson.add_upper, delta);
  return cmp;
}

}  // namespace pld
