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

#include "smite/training.h"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "smite/errors.h"
#include "smite/synthetic.h"

namespace smite {
namespace {

TrainConfig SmallConfig() {
  TrainConfig c;
  c.hidden_widths = {8, 8, 4};
  c.epochs = 5;
  c.batch_size = 64;
  c.seed = 3;
  c.qini_grid = 20;
  return c;
}

struct Data {
  UpliftDataset train;
  UpliftDataset valid;
};

Data MakeData(std::size_t n = 600, std::size_t p = 5, std::uint64_t seed = 1) {
  const ParametricSample s = GenerateParametric(DefaultSyntheticSpec(n, p, seed));
  std::vector<std::size_t> a, b;
  for (std::size_t i = 0; i < n; ++i) (i % 3 == 0 ? b : a).push_back(i);
  return {s.dataset.Subset(a), s.dataset.Subset(b)};
}

TEST(TrainConfigTest, Validation) {
  TrainConfig c = SmallConfig();
  EXPECT_NO_THROW(c.Validate());
  c.alpha = 1.2;
  EXPECT_THROW(c.Validate(), UsageError);
  c = SmallConfig();
  c.epochs = 0;
  EXPECT_THROW(c.Validate(), UsageError);
  c = SmallConfig();
  c.batch_size = 0;
  EXPECT_THROW(c.Validate(), UsageError);
  c = SmallConfig();
  c.learning_rate = -0.1;
  EXPECT_THROW(c.Validate(), UsageError);
  EXPECT_DOUBLE_EQ(TrainConfig().learning_rate, 0.03);
  EXPECT_EQ(TrainConfig().batch_size, 256u);
}

TEST(TrainTest, ZeroLearningRateKeepsInitialization) {
  const Data d = MakeData();
  TrainConfig c = SmallConfig();
  c.learning_rate = 0.0;
  const TrainedModel m = Train(c, d.train, d.valid);
  EXPECT_EQ(m.params, InitParameters(m.arch, MixSeed(c.seed, 10)));
  EXPECT_EQ(m.best_epoch, 1u);  // every epoch ties; the earliest wins
}

TEST(TrainTest, SingleFullBatchStepEqualsFiniteDifferenceStep) {
  const Data d = MakeData(90, 3, 2);
  for (LossVariant v : {LossVariant::kIndirect, LossVariant::kTransformedOutcome}) {
    TrainConfig c = SmallConfig();
    c.variant = v;
    c.alpha = 0.3;
    c.epochs = 1;
    c.batch_size = 1000;
    c.learning_rate = 0.1;
    const TrainedModel m = Train(c, d.train, d.valid);

    const Matrix x = m.standardizer.Apply(d.train.features());
    const Vector& t = d.train.treatment();
    const Vector& y = d.train.outcome();
    const Vector z = TransformOutcome(d.train);
    const Parameters init = InitParameters(m.arch, MixSeed(c.seed, 10));
    Parameters probe = init;
    const Vector grad = FiniteDifferenceGradient(
        [&](std::span<const double> theta) {
          probe.Unflatten(theta);
          const TwinOutput out = ForwardTwin(probe, m.arch, x, t);
          return CompositeLoss(c.Objective(), {out.mu1, out.mu0, t, y, z});
        },
        init.Flatten(), 1e-6);
    const Vector before = init.Flatten();
    const Vector after = m.params.Flatten();
    for (std::size_t k = 0; k < before.size(); ++k) {
      const double expected = before[k] - c.learning_rate * grad[k];
      const double step = std::abs(before[k] - expected);
      EXPECT_NEAR(after[k], expected, 1e-5 * std::max(step, 1e-6)) << k;
    }
  }
}

TEST(TrainTest, DeterministicAndBookkeepingConsistent) {
  const Data d = MakeData();
  const TrainConfig c = SmallConfig();
  const TrainedModel a = Train(c, d.train, d.valid);
  const TrainedModel b = Train(c, d.train, d.valid);
  EXPECT_EQ(a.params, b.params);
  EXPECT_EQ(a.epoch_valid_qini, b.epoch_valid_qini);
  ASSERT_EQ(a.epoch_valid_qini.size(), c.epochs);
  const auto best = std::max_element(a.epoch_valid_qini.begin(), a.epoch_valid_qini.end());
  EXPECT_EQ(a.best_valid_qini, *best);
  EXPECT_EQ(a.best_epoch, static_cast<std::size_t>(best - a.epoch_valid_qini.begin()) + 1);
  // The kept snapshot reproduces the recorded validation score.
  const TwinOutput out = a.Predict(d.valid.features());
  EXPECT_EQ(QiniCoefficient(ComputeQiniCurve(out.uplift, d.valid.treatment(),
                                             d.valid.outcome(), c.qini_grid)),
            a.best_valid_qini);
}

TEST(TrainTest, IndirectLossNeedsBalancedAssignment) {
  const Data d = MakeData();
  const UpliftDataset skewed = d.train.WithPropensity(0.3);
  TrainConfig c = SmallConfig();
  EXPECT_THROW(Train(c, skewed, d.valid), UnsupportedPropensityError);
  c.variant = LossVariant::kTransformedOutcome;
  EXPECT_NO_THROW(Train(c, skewed, d.valid));
}

TEST(TrainTest, DivergenceReportsEpochAndRate) {
  const Data d = MakeData();
  TrainConfig c = SmallConfig();
  c.variant = LossVariant::kTransformedOutcome;
  c.alpha = 0.0;
  c.learning_rate = 1e200;
  c.epochs = 50;
  try {
    Train(c, d.train, d.valid);
    FAIL() << "expected DivergedError";
  } catch (const DivergedError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("epoch"), std::string::npos) << msg;
    EXPECT_NE(msg.find("1e+200"), std::string::npos) << msg;
  }
}

TEST(TrainTest, MissingArmIsStratificationError) {
  const Data d = MakeData();
  std::vector<std::size_t> treated;
  for (std::size_t i = 0; i < d.train.size(); ++i) {
    if (d.train.treatment()[i] == 1.0) treated.push_back(i);
  }
  EXPECT_THROW(Train(SmallConfig(), d.train.Subset(treated), d.valid),
               StratificationError);
}

TEST(GridTest, AlphaAndLearningRateGrids) {
  const Vector alpha = AlphaGrid();
  ASSERT_EQ(alpha.size(), 11u);
  for (std::size_t i = 0; i < 11; ++i) EXPECT_NEAR(alpha[i], 0.1 * i, 1e-15);
  const Vector rates = LearningRateGrid();
  EXPECT_EQ(rates.size(), 5u);
  for (double r : rates) EXPECT_GT(r, 0.0);
}

TEST(SelectByConfidenceTest, PlantedValues) {
  const Vector grid = {0.1, 0.2};
  const TuneResult r = SelectByConfidence("alpha", grid, {{0.3, 0.3}, {0.5, -0.1}});
  EXPECT_DOUBLE_EQ(r.selected, 0.1);
  EXPECT_FALSE(r.fallback);
  // Hand arithmetic: mean 0.2, sd 0.6 / sqrt(2), se 0.3.
  EXPECT_NEAR(r.candidates[1].mean, 0.2, 1e-15);
  EXPECT_NEAR(r.candidates[1].ci_lower, 0.2 - 1.96 * 0.3, 1e-12);
  EXPECT_NEAR(r.candidates[1].ci_upper, 0.2 + 1.96 * 0.3, 1e-12);
  EXPECT_DOUBLE_EQ(r.candidates[0].ci_lower, 0.3);
}

TEST(SelectByConfidenceTest, ZeroScoresNeverBeatPositiveLowerBound) {
  const Vector grid = {0.0, 0.5, 1.0};
  const TuneResult r =
      SelectByConfidence("alpha", grid, {{0, 0, 0}, {0.1, 0.12, 0.11}, {0, 0, 0}});
  EXPECT_DOUBLE_EQ(r.selected, 0.5);
}

TEST(SelectByConfidenceTest, FallbackPicksGreatestLowerBound) {
  const Vector grid = {0.1, 0.2, 0.3};
  const TuneResult r = SelectByConfidence(
      "alpha", grid, {{0.5, -0.5}, {0.05, -0.02}, {0.3, -0.3}});
  EXPECT_TRUE(r.fallback);
  EXPECT_DOUBLE_EQ(r.selected, 0.2);
}

TEST(SelectByConfidenceTest, FailedFoldsAreSkippedAndAllFailedExcluded) {
  const Vector grid = {0.1, 0.2, 0.3};
  const std::optional<double> none;
  const TuneResult r = SelectByConfidence(
      "alpha", grid, {{none, none}, {0.2, none}, {0.1, 0.12}});
  EXPECT_TRUE(r.candidates[0].excluded);
  EXPECT_EQ(r.candidates[1].successful_folds, 1u);
  EXPECT_EQ(r.candidates[1].ci_lower, -std::numeric_limits<double>::infinity());
  EXPECT_DOUBLE_EQ(r.selected, 0.3);
  EXPECT_THROW(SelectByConfidence("alpha", Vector{0.1}, {{none}}), NumericError);
}

TEST(TuneGridTest, RecordsFailuresAndIgnoresEvaluationOrder) {
  const Vector grid = {0.3, 0.1, 0.03};
  const FoldScorer scorer = [](double v, std::size_t fold) {
    if (v == 0.3 && fold == 1) throw DivergedError("diverged");
    return v * (1.0 + 0.1 * fold);
  };
  const TuneResult serial = TuneGrid("learning_rate", grid, 3, scorer, 1);
  const TuneResult parallel = TuneGrid("learning_rate", grid, 3, scorer, 4);
  EXPECT_EQ(serial.failures.size(), 1u);
  EXPECT_EQ(serial.candidates[0].successful_folds, 2u);
  EXPECT_DOUBLE_EQ(serial.selected, 0.3);
  EXPECT_EQ(serial.selected, parallel.selected);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    EXPECT_EQ(serial.candidates[g].fold_scores, parallel.candidates[g].fold_scores);
  }
  // Reversing the grid only reorders the candidates.
  const Vector reversed(grid.rbegin(), grid.rend());
  const TuneResult rev = TuneGrid("learning_rate", reversed, 3, scorer, 1);
  for (std::size_t g = 0; g < grid.size(); ++g) {
    EXPECT_EQ(rev.candidates[grid.size() - 1 - g].fold_scores,
              serial.candidates[g].fold_scores);
  }
  EXPECT_EQ(rev.selected, serial.selected);
}

TEST(TuneAlphaTest, DeterministicUnderFixedSeed) {
  const ParametricSample s = GenerateParametric(DefaultSyntheticSpec(400, 4, 5));
  TrainConfig base = SmallConfig();
  base.epochs = 2;
  SplitPlan plan;
  plan.holdout_fraction = 0.0;
  plan.repeats = 2;
  plan.seed = 8;
  const TuneResult a = TuneAlpha(s.dataset, plan, base, 1);
  const TuneResult b = TuneAlpha(s.dataset, plan, base, 2);
  ASSERT_EQ(a.candidates.size(), 11u);
  EXPECT_EQ(a.selected, b.selected);
  for (std::size_t g = 0; g < 11; ++g) {
    EXPECT_EQ(a.candidates[g].fold_scores, b.candidates[g].fold_scores);
  }
  plan.repeats = 1;
  EXPECT_THROW(TuneAlpha(s.dataset, plan, base, 1), UsageError);
}

}  // namespace
}  // namespace smite
