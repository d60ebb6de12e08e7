/*
 * Copyright 2026 The SMITE Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Synthetic randomized-trial generators.
//
// The parametric generator draws x ~ N(0, I_p), T ~ Bernoulli(1/2) and
//   Pr(Y = 1 | T, x) = sigmoid(b0 + x.b + T (g0 + x.g)),
// so the true uplift of a row is
//   sigmoid(b0 + x.b + g0 + x.g) - sigmoid(b0 + x.b).
// The bootstrap generator resamples an existing dataset and redraws its
// outcomes from a fitted model's conditional means.

#ifndef SMITE_SYNTHETIC_H_
#define SMITE_SYNTHETIC_H_

#include <cstddef>
#include <cstdint>
#include <span>

#include "smite/data.h"
#include "smite/numerics.h"

namespace smite {

struct SyntheticSpec {
  std::size_t n = 20000;
  std::size_t p = 100;
  std::uint64_t seed = 0;
  Vector baseline_coeffs;  // b, length p
  double baseline_intercept = 0.0;
  Vector uplift_coeffs;  // g, length p
  double uplift_intercept = 0.0;
  double sparsity = 0.1;  // fraction of nonzero entries of g

  // Throws UsageError naming the offending field.
  void Validate() const;
};

// Default coefficient draw, reproducible from `seed`:
//   b_j ~ N(0, sd = 1/sqrt(p)),
//   g has ceil(sparsity * p) nonzero entries of magnitude 0.5, random signs,
//   b0 solves E[sigmoid(b0 + x.b)] = base_rate (0.10),
//   g0 = 0.05.
SyntheticSpec DefaultSyntheticSpec(std::size_t n, std::size_t p,
                                   std::uint64_t seed, double sparsity = 0.1,
                                   double base_rate = 0.10);

// Intercept b0 with E[sigmoid(b0 + s Z)] = rate for Z ~ N(0, 1), found by
// bisection over a quadrature of the normal density.
double SolveBaselineIntercept(double linear_sd, double rate);

// Pr(Y = 1 | T = treated, x) under `spec`.
double ResponseProbability(const SyntheticSpec& spec, std::span<const double> x,
                           bool treated);
double TrueUplift(const SyntheticSpec& spec, std::span<const double> x);

struct ParametricSample {
  UpliftDataset dataset;
  Vector true_uplift;
};

// Propensity of the produced dataset is exactly 1/2.
ParametricSample GenerateParametric(const SyntheticSpec& spec);

// Resamples rows of `source` with replacement and redraws each outcome as
// Bernoulli(m_T(x)) using the resampled row's treatment. Means in [0, 1] are
// clamped to [1e-7, 1 - 1e-7]; anything else raises a NumericError.
UpliftDataset GenerateBootstrap(const UpliftDataset& source,
                                const ConditionalMeanModel& fitted,
                                std::uint64_t seed);

}  // namespace smite

#endif  // SMITE_SYNTHETIC_H_
