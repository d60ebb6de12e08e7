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

#ifndef SMITE_TRAINING_H_
#define SMITE_TRAINING_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "smite/data.h"
#include "smite/losses.h"
#include "smite/metrics.h"
#include "smite/model.h"

namespace smite {

inline constexpr double kDefaultLearningRate = 0.03;

struct TrainConfig {
  LossVariant variant = LossVariant::kIndirect;
  double alpha = 0.5;
  double learning_rate = kDefaultLearningRate;
  std::size_t epochs = 200;
  std::size_t batch_size = 256;
  std::uint64_t seed = 0;
  std::vector<std::size_t> hidden_widths = {200, 200, 300, 100, 50, 10};
  std::size_t linear_prefix = 2;
  double leaky_slope = 0.01;
  // Validation q-hat settings used for best-epoch selection.
  std::size_t qini_grid = 100;
  QiniFormula qini_formula = QiniFormula::kCorrected;

  // Throws UsageError naming the offending field. A zero learning rate is
  // allowed (it leaves the initialization untouched).
  void Validate() const;
  Architecture ArchitectureFor(std::size_t num_features) const;
  CompositeSpec Objective() const { return {variant, alpha}; }
};

// A trained twin network plus everything needed to score raw covariates.
class TrainedModel : public ConditionalMeanModel {
 public:
  Architecture arch;
  Parameters params;
  Standardizer standardizer;
  TrainConfig config;
  std::size_t best_epoch = 0;  // 1-based
  double best_valid_qini = 0.0;
  Vector epoch_valid_qini;  // one entry per epoch

  // Raw covariates in, twin outputs out.
  TwinOutput Predict(const Matrix& features,
                     std::span<const double> treatment = {}) const;
  ConditionalMeans PredictConditionalMeans(
      const Matrix& features) const override;
};

// Minibatch SGD on the composite objective with a fixed learning rate. The
// covariates are standardized with statistics of `train`. After every epoch
// the validation Qini coefficient is measured and the best snapshot (earliest
// on ties) is returned.
//
// Throws UnsupportedPropensityError for IE when the propensity is not 1/2 and
// DivergedError when the loss stops being finite.
TrainedModel Train(const TrainConfig& config, const UpliftDataset& train,
                   const UpliftDataset& valid);

// ---------------------------------------------------------------------------
// Hyper-parameter selection.

struct TuneCandidate {
  double value = 0.0;
  std::vector<std::optional<double>> fold_scores;  // nullopt: fold failed
  std::size_t successful_folds = 0;
  double mean = 0.0;
  double ci_lower = 0.0;  // mean -/+ 1.96 standard errors
  double ci_upper = 0.0;
  bool excluded = false;  // every fold failed
};

struct TuneResult {
  std::string parameter;
  std::vector<TuneCandidate> candidates;
  double selected = 0.0;
  // No candidate had a CI lower bound above zero; the greatest lower bound
  // was selected instead.
  bool fallback = false;
  std::vector<std::string> failures;  // "value=.. fold=..: message"
};

// 0.0, 0.1, ..., 1.0.
Vector AlphaGrid();
// 0.3, 0.1, 0.03, 0.01, 0.003.
Vector LearningRateGrid();

// Picks the value with the highest mean fold score among those whose 95%
// normal-approximation CI lower bound is above zero; otherwise the value with
// the greatest lower bound, flagged as a fallback. Values whose folds all
// failed are never selected. A single successful fold gives an unbounded CI.
TuneResult SelectByConfidence(
    const std::string& parameter, std::span<const double> grid,
    const std::vector<std::vector<std::optional<double>>>& fold_scores);

// Scores one (value, fold) pair; exceptions mark the fold as failed.
using FoldScorer = std::function<double(double value, std::size_t fold)>;

// Evaluates every (value, fold) job on up to `workers` threads and applies
// SelectByConfidence.
TuneResult TuneGrid(const std::string& parameter, std::span<const double> grid,
                    std::size_t folds, const FoldScorer& scorer,
                    std::size_t workers = 1);

// Repeated random train/valid separation of `tuning_set` (plan.repeats folds,
// plan.train_fraction_of_rest train share, no holdout), training `base` with
// each grid value and scoring the best validation Qini coefficient. Fold f
// always uses the same rows and training seed regardless of the grid order.
TuneResult TuneAlpha(const UpliftDataset& tuning_set, const SplitPlan& plan,
                     const TrainConfig& base, std::size_t workers = 1);
TuneResult TuneLearningRate(const UpliftDataset& tuning_set,
                            const SplitPlan& plan, const TrainConfig& base,
                            std::size_t workers = 1);

// ---------------------------------------------------------------------------
// Persistence. Versioned text: a header, the architecture and configuration,
// the standardization statistics, then every layer's weights row by row and
// its bias, all with 17 significant digits. Loading reproduces predictions
// bit for bit. Throws ParseError on version mismatch, truncation or
// inconsistent dimensions.

void SaveModel(const TrainedModel& model, const std::string& path);
TrainedModel LoadModel(const std::string& path);
// Additionally requires the stored architecture to equal `expected`.
TrainedModel LoadModel(const std::string& path, const Architecture& expected);

}  // namespace smite

#endif  // SMITE_TRAINING_H_
