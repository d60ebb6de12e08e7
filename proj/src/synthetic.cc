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

#include "smite/synthetic.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "smite/errors.h"

namespace smite {
namespace {

constexpr double kMeanClamp = 1e-7;

double Dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// E[sigmoid(b0 + s Z)], Z ~ N(0, 1), composite Simpson on [-10, 10].
double ExpectedSigmoid(double b0, double s) {
  constexpr int kIntervals = 4000;
  constexpr double kLo = -10.0;
  constexpr double kHi = 10.0;
  const double h = (kHi - kLo) / kIntervals;
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi);
  double acc = 0.0;
  for (int i = 0; i <= kIntervals; ++i) {
    const double z = kLo + i * h;
    const double w = (i == 0 || i == kIntervals) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * Sigmoid(b0 + s * z) * norm * std::exp(-0.5 * z * z);
  }
  return acc * h / 3.0;
}

}  // namespace

void SyntheticSpec::Validate() const {
  if (n < 2) throw UsageError("n must be >= 2");
  if (p < 1) throw UsageError("p must be >= 1");
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
    throw UsageError("sparsity must be in [0, 1]");
  }
  if (baseline_coeffs.size() != p) {
    throw UsageError("baseline coefficients must have length p");
  }
  if (uplift_coeffs.size() != p) {
    throw UsageError("uplift coefficients must have length p");
  }
}

double SolveBaselineIntercept(double linear_sd, double rate) {
  if (!(rate > 0.0 && rate < 1.0)) {
    throw UsageError("base rate must be in (0, 1)");
  }
  double lo = -50.0;
  double hi = 50.0;
  for (int it = 0; it < 200 && hi - lo > 1e-12; ++it) {
    const double mid = 0.5 * (lo + hi);
    (ExpectedSigmoid(mid, linear_sd) < rate ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

SyntheticSpec DefaultSyntheticSpec(std::size_t n, std::size_t p,
                                   std::uint64_t seed, double sparsity,
                                   double base_rate) {
  SyntheticSpec spec;
  spec.n = n;
  spec.p = p;
  spec.seed = seed;
  spec.sparsity = sparsity;
  if (p < 1) throw UsageError("p must be >= 1");
  if (!(sparsity >= 0.0 && sparsity <= 1.0)) {
    throw UsageError("sparsity must be in [0, 1]");
  }

  std::mt19937_64 rng(MixSeed(seed, 1));
  std::normal_distribution<double> coef(0.0, 1.0 / std::sqrt(double(p)));
  spec.baseline_coeffs.resize(p);
  for (double& b : spec.baseline_coeffs) b = coef(rng);

  const auto nonzero = std::min<std::size_t>(
      p, static_cast<std::size_t>(std::ceil(sparsity * double(p) - 1e-9)));
  std::vector<std::size_t> order(p);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution sign(0.5);
  spec.uplift_coeffs.assign(p, 0.0);
  for (std::size_t k = 0; k < nonzero; ++k) {
    spec.uplift_coeffs[order[k]] = sign(rng) ? 0.5 : -0.5;
  }

  const double linear_sd = std::sqrt(Dot(spec.baseline_coeffs,
                                         spec.baseline_coeffs));
  spec.baseline_intercept = SolveBaselineIntercept(linear_sd, base_rate);
  spec.uplift_intercept = 0.05;
  return spec;
}

double ResponseProbability(const SyntheticSpec& spec, std::span<const double> x,
                           bool treated) {
  double eta = spec.baseline_intercept + Dot(x, spec.baseline_coeffs);
  if (treated) eta += spec.uplift_intercept + Dot(x, spec.uplift_coeffs);
  return Sigmoid(eta);
}

double TrueUplift(const SyntheticSpec& spec, std::span<const double> x) {
  return ResponseProbability(spec, x, true) -
         ResponseProbability(spec, x, false);
}

ParametricSample GenerateParametric(const SyntheticSpec& spec) {
  spec.Validate();
  std::mt19937_64 rng(MixSeed(spec.seed, 2));
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Matrix x(spec.n, spec.p);
  Vector t(spec.n);
  Vector y(spec.n);
  Vector truth(spec.n);
  for (std::size_t i = 0; i < spec.n; ++i) {
    auto row = x.Row(i);
    for (double& v : row) v = normal(rng);
    t[i] = unif(rng) < 0.5 ? 1.0 : 0.0;
    y[i] = unif(rng) < ResponseProbability(spec, row, t[i] == 1.0) ? 1.0 : 0.0;
    truth[i] = TrueUplift(spec, row);
  }
  return ParametricSample{UpliftDataset(std::move(x), std::move(t),
                                        std::move(y), 0.5),
                          std::move(truth)};
}

UpliftDataset GenerateBootstrap(const UpliftDataset& source,
                                const ConditionalMeanModel& fitted,
                                std::uint64_t seed) {
  const std::size_t n = source.size();
  std::mt19937_64 rng(MixSeed(seed, 3));
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  std::vector<std::size_t> rows(n);
  for (auto& r : rows) r = pick(rng);

  const UpliftDataset resampled = source.Subset(rows);
  const ConditionalMeans means =
      fitted.PredictConditionalMeans(resampled.features());
  if (means.treated.size() != n || means.control.size() != n) {
    throw ShapeError("GenerateBootstrap: model returned " +
                     std::to_string(means.treated.size()) + " means for " +
                     std::to_string(n) + " rows");
  }

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double m = resampled.treatment()[i] == 1.0 ? means.treated[i]
                                               : means.control[i];
    if (!(m >= 0.0 && m <= 1.0)) {
      throw NumericError("GenerateBootstrap: conditional mean " +
                         std::to_string(m) + " at row " + std::to_string(i) +
                         " is outside [0, 1]");
    }
    m = std::clamp(m, kMeanClamp, 1.0 - kMeanClamp);
    y[i] = unif(rng) < m ? 1.0 : 0.0;
  }
  return UpliftDataset(resampled.features(), resampled.treatment(),
                       std::move(y), source.propensity(),
                       source.feature_names());
}

}  // namespace smite
