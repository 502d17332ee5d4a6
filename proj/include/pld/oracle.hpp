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
#include "pld/kahan.hpp"
#include "pld/mechanisms.hpp"
#include "pld/normal.hpp"
#include "pld/types.hpp"

// Independent exact and analytic references used by tests and acceptance
// criteria. Nothing here shares code with the transform pipeline it checks.

namespace pld {

namespace oracle {

inline constexpr int64_t kEnumerationCap = 1000000;

// Exact PLD of the 1-out-of-t allocation pair on a finite alphabet, by full
// enumeration of the t-fold product space: the allocation side is
// avg_i Q^{i-1} x P x Q^{t-i}, the reference side Q^t. Remove draws from
// the allocation side, add from Q^t. Equal losses merge under a 1e-12
// relative key tolerance.
inline DiscretePld brute_force_alloc_pld(const DiscretePair& pair, int64_t t,
                                         AdjacencyDirection adj) {
  pair.validate();
  if (t < 1) throw InvalidArgumentError("brute_force_alloc_pld: t >= 1");
  const int64_t m = static_cast<int64_t>(pair.p.size());
  double states = std::pow(static_cast<double>(m), static_cast<double>(t));
  if (states > static_cast<double>(kEnumerationCap)) {
    throw TooLargeError("brute_force_alloc_pld: |alphabet|^t exceeds cap");
  }

  std::vector<int64_t> digits(static_cast<size_t>(t), 0);
  std::vector<std::pair<double, double>> entries;  // (loss, mass)
  entries.reserve(static_cast<size_t>(states));
  double p_top = 0.0;

  bool done = false;
  while (!done) {
    double qt = 1.0;
    int zero_q = 0;
    size_t zero_pos = 0;
    double ratio_sum = 0.0;
    for (size_t i = 0; i < digits.size(); ++i) {
      double qi = pair.q[static_cast<size_t>(digits[i])];
      if (qi == 0.0) {
        ++zero_q;
        zero_pos = i;
      } else {
        qt *= qi;
      }
    }
    if (zero_q == 0) {
      for (size_t i = 0; i < digits.size(); ++i) {
        size_t a = static_cast<size_t>(digits[i]);
        ratio_sum += pair.p[a] / pair.q[a];
      }
    }
    // pbar = (1/t) sum_i P(w_i) prod_{j != i} Q(w_j)
    double pbar;
    if (zero_q == 0) {
      pbar = qt * ratio_sum / static_cast<double>(t);
    } else if (zero_q == 1) {
      pbar = pair.p[static_cast<size_t>(digits[zero_pos])] * qt /
             static_cast<double>(t);
    } else {
      pbar = 0.0;
    }
    double qmass = zero_q == 0 ? qt : 0.0;

    if (adj == AdjacencyDirection::kRemove) {
      if (pbar > 0.0) {
        if (qmass > 0.0) {
          entries.emplace_back(std::log(ratio_sum / static_cast<double>(t)),
                               pbar);
        } else {
          p_top += pbar;
        }
      }
    } else {
      if (qmass > 0.0) {
        if (pbar > 0.0) {
          entries.emplace_back(-std::log(ratio_sum / static_cast<double>(t)),
                               qmass);
        } else {
          p_top += qmass;
        }
      }
    }

    // Odometer increment.
    size_t pos = 0;
    while (pos < digits.size()) {
      if (++digits[pos] < m) break;
      digits[pos] = 0;
      ++pos;
    }
    done = pos == digits.size();
  }

  std::sort(entries.begin(), entries.end());
  std::vector<double> values;
  std::vector<double> probs;
  for (const auto& [loss, mass] : entries) {
    if (!values.empty() &&
        std::abs(loss - values.back()) <=
            1e-12 * std::max({1.0, std::abs(loss), std::abs(values.back())})) {
      probs.back() += mass;
    } else {
      values.push_back(loss);
      probs.push_back(mass);
    }
  }
  return DiscretePld(std::move(values), std::move(probs), 0.0, p_top);
}

// Dominating pair of the Poisson-subsampled mechanism in the remove
// direction: (lambda P + (1-lambda) Q, Q), exactly.
inline DiscretePair exact_subsampled_pair(const DiscretePair& pair,
                                          double lambda) {
  pair.validate();
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw InvalidArgumentError("exact_subsampled_pair: lambda in [0, 1]");
  }
  std::vector<double> mixed(pair.p.size());
  for (size_t i = 0; i < pair.p.size(); ++i) {
    mixed[i] = lambda * pair.p[i] + (1.0 - lambda) * pair.q[i];
  }
  return DiscretePair(std::move(mixed), pair.q);
}

namespace detail {

// 20-point Gauss-Legendre nodes and weights on [-1, 1].
inline constexpr double kGlNodes[10] = {
    0.0765265211334973, 0.2277858511416451, 0.3737060887154195,
    0.5108670019508271, 0.6360536807265150, 0.7463319064601508,
    0.8391169718222188, 0.9122344282513259, 0.9639719272779138,
    0.9931285991850949};
inline constexpr double kGlWeights[10] = {
    0.1527533871307258, 0.1491729864726037, 0.1420961093183820,
    0.1316886384491766, 0.1181945319615184, 0.1019301198172404,
    0.0832767415767048, 0.0626720483341091, 0.0406014298003869,
    0.0176140071391521};

template <typename F>
double gauss_legendre(F&& f, double a, double b, int panels) {
  KahanSum acc;
  const double h = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    const double half = 0.5 * h;
    for (int i = 0; i < 10; ++i) {
      acc.add(kGlWeights[i] * half * f(mid + half * kGlNodes[i]));
      acc.add(kGlWeights[i] * half * f(mid - half * kGlNodes[i]));
    }
  }
  return acc.value();
}

}  // namespace detail

// delta(epsilon) of the Gaussian pair N(1, sigma^2) vs N(0, sigma^2) by
// numeric integration of the positive part of (P - e^eps Q); absolute error
// well under 1e-12. The integrand is positive exactly on
// x > x* = eps sigma^2 + 1/2.
inline double gaussian_delta_quadrature(double sigma, double epsilon) {
  if (!(sigma > 0.0)) {
    throw InvalidArgumentError("gaussian_delta_quadrature: sigma > 0");
  }
  const double xstar = epsilon * sigma * sigma + 0.5;
  const double hi = xstar + 14.0 * sigma + 1.0;
  const double ee = std::exp(epsilon);
  auto integrand = [&](double x) {
    double zp = (x - 1.0) / sigma;
    double zq = x / sigma;
    return (norm_pdf(zp) - ee * norm_pdf(zq)) / sigma;
  };
  double v = detail::gauss_legendre(integrand, xstar, hi, 256);
  return std::max(0.0, v);
}

// Same quantity in closed form via the normal CDF; the quadrature oracle is
// cross-checked against this expression in the tests.
inline double gaussian_delta_analytic(double sigma, double epsilon) {
  if (!(sigma > 0.0)) {
    throw InvalidArgumentError("gaussian_delta_analytic: sigma > 0");
  }
  double a = norm_cdf(1.0 / (2.0 * sigma) - epsilon * sigma);
  double b = norm_cdf(-1.0 / (2.0 * sigma) - epsilon * sigma);
  double d = a - std::exp(epsilon) * b;
  return std::max(0.0, d);
}

// Remove-direction delta(epsilon) of the Poisson-subsampled Gaussian pair
// (lambda N(1, s^2) + (1-lambda) N(0, s^2), N(0, s^2)) by quadrature.
inline double subsampled_gaussian_delta_quadrature(double sigma, double lambda,
                                                   double epsilon) {
  if (!(sigma > 0.0)) {
    throw InvalidArgumentError("subsampled_gaussian_delta_quadrature");
  }
  if (lambda <= 0.0) return std::max(0.0, -std::expm1(epsilon));
  const double ee = std::exp(epsilon);
  if (ee <= 1.0 - lambda) {
    // The integrand is positive everywhere.
    return 1.0 - ee;
  }
  const double xstar =
      sigma * sigma * std::log((ee - (1.0 - lambda)) / lambda) + 0.5;
  const double hi = xstar + 14.0 * sigma + 1.0;
  auto integrand = [&](double x) {
    double zp = (x - 1.0) / sigma;
    double zq = x / sigma;
    return (lambda * norm_pdf(zp) + (1.0 - lambda - ee) * norm_pdf(zq)) /
           sigma;
  };
  double v = detail::gauss_legendre(integrand, xstar, hi, 256);
  return std::max(0.0, v);
}

// Closed-form counterpart of the above.
inline double subsampled_gaussian_delta_analytic(double sigma, double lambda,
                                                 double epsilon) {
  if (lambda <= 0.0) return std::max(0.0, -std::expm1(epsilon));
  const double ee = std::exp(epsilon);
  if (ee <= 1.0 - lambda) return 1.0 - ee;
  const double xstar =
      sigma * sigma * std::log((ee - (1.0 - lambda)) / lambda) + 0.5;
  double d = lambda * norm_sf((xstar - 1.0) / sigma) -
             (ee - (1.0 - lambda)) * norm_sf(xstar / sigma);
  return std::max(0.0, d);
}

// Closed-form finite exp-moment E[e^L] of the remove-direction allocation
// PLD for the Gaussian mechanism: expanding E over the t^2 cross terms
// gives diagonal terms e^{1/sigma^2} and off-diagonal terms 1, hence
// (e^{1/sigma^2} + t - 1)/t. Verified against brute_force_alloc_pld on a
// binned Gaussian surrogate in the oracle tests.
inline double gaussian_alloc_exp_moment(double sigma, int64_t t) {
  if (!(sigma > 0.0) || t < 1) {
    throw InvalidArgumentError("gaussian_alloc_exp_moment: sigma > 0, t >= 1");
  }
  return (std::exp(1.0 / (sigma * sigma)) + static_cast<double>(t) - 1.0) /
         static_cast<double>(t);
}

// Finite-part exp-moment E[e^L] of a PLD (the +inf atom is excluded).
inline double finite_exp_moment(const DiscretePld& L) {
  KahanSum acc;
  for (size_t i = 0; i < L.size(); ++i) {
    if (L.probs()[i] > 0.0) acc.add(L.probs()[i] * std::exp(L.values()[i]));
  }
  return acc.value();
}

// Bins a Gaussian pair (N(mu_p, s^2), N(mu_q, s^2)) onto a finite alphabet;
// a surrogate for exercising the exact enumeration oracles against
// continuous-mechanism formulas.
inline DiscretePair binned_gaussian_pair(double sigma, int bins,
                                         double half_width) {
  if (bins < 2) throw InvalidArgumentError("binned_gaussian_pair: bins >= 2");
  const double lo = 0.5 - half_width;
  const double hi = 0.5 + half_width;
  const double h = (hi - lo) / bins;
  std::vector<double> p(static_cast<size_t>(bins) + 2);
  std::vector<double> q(static_cast<size_t>(bins) + 2);
  // Outer cells catch the tails so both vectors sum to 1 exactly.
  p[0] = norm_cdf((lo - 1.0) / sigma);
  q[0] = norm_cdf(lo / sigma);
  double prev_p = p[0], prev_q = q[0];
  for (int i = 1; i <= bins; ++i) {
    double edge = lo + i * h;
    double cp = norm_cdf((edge - 1.0) / sigma);
    double cq = norm_cdf(edge / sigma);
    p[static_cast<size_t>(i)] = cp - prev_p;
    q[static_cast<size_t>(i)] = cq - prev_q;
    prev_p = cp;
    prev_q = cq;
  }
  p[static_cast<size_t>(bins) + 1] = 1.0 - prev_p;
  q[static_cast<size_t>(bins) + 1] = 1.0 - prev_q;
  return DiscretePair(std::move(p), std::move(q));
}

}  // namespace oracle

}  // namespace pld
