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

// Classical logistic-regression uplift baselines:
//  * two-model: separate response models on the treated and control rows;
//  * interaction: one model on [x, t, x * t].
// Both are fitted by full-batch gradient descent on the mean cross-entropy
// plus an L2 penalty on the slopes.

#ifndef SMITE_BASELINES_H_
#define SMITE_BASELINES_H_

#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include "smite/data.h"
#include "smite/numerics.h"

namespace smite {

struct LogisticFitOptions {
  double learning_rate = 0.1;
  std::size_t iterations = 2000;
  double l2 = 1e-4;
};

struct LogisticModel {
  Vector coefficients;
  double intercept = 0.0;

  // sigmoid(intercept + design * coefficients) for every row.
  Vector PredictProbability(const Matrix& design) const;

  friend bool operator==(const LogisticModel&, const LogisticModel&) = default;
};

struct LogisticObjective {
  double value = 0.0;
  Vector gradient;  // coefficients first, intercept last
};

// mean BCE + (l2 / 2) * |coefficients|^2 and its gradient; `packed` holds the
// coefficients followed by the intercept.
LogisticObjective EvaluateLogistic(const Matrix& design, std::span<const double> y,
                                   std::span<const double> packed, double l2);

// Starts from zero. Throws NumericError if the fit diverges.
LogisticModel FitLogistic(const Matrix& design, std::span<const double> y,
                          const LogisticFitOptions& options = {});

class TwoModelBaseline : public ConditionalMeanModel {
 public:
  Standardizer standardizer;
  LogisticModel treated;
  LogisticModel control;

  ConditionalMeans PredictConditionalMeans(
      const Matrix& features) const override;
};

class InteractionBaseline : public ConditionalMeanModel {
 public:
  Standardizer standardizer;
  LogisticModel model;  // 2p + 1 coefficients over [x, t, x * t]

  // [x, t, x * t] for standardized covariates.
  static Matrix Design(const Matrix& standardized, std::span<const double> t);
  // Design with t fixed for every row.
  static Matrix Design(const Matrix& standardized, double t);

  ConditionalMeans PredictConditionalMeans(
      const Matrix& features) const override;
};

// Throws StratificationError when an arm is empty.
TwoModelBaseline FitTwoModel(const UpliftDataset& ds,
                             const LogisticFitOptions& options = {});
InteractionBaseline FitInteraction(const UpliftDataset& ds,
                                   const LogisticFitOptions& options = {});

// Same text format family as SaveModel, tagged "two_model" or "interaction".
void SaveBaseline(const TwoModelBaseline& model, const std::string& path);
void SaveBaseline(const InteractionBaseline& model, const std::string& path);
TwoModelBaseline LoadTwoModelBaseline(const std::string& path);
InteractionBaseline LoadInteractionBaseline(const std::string& path);

// Loads any model file (twin network or baseline) by its type tag.
std::unique_ptr<ConditionalMeanModel> LoadAnyModel(const std::string& path);
// "smite", "two_model" or "interaction"; throws ParseError otherwise.
std::string ModelFileType(const std::string& path);

}  // namespace smite

#endif  // SMITE_BASELINES_H_
