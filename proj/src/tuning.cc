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

#include <cmath>
#include <cstdio>
#include <limits>

#include "smite/errors.h"
#include "smite/parallel.h"
#include "smite/training.h"

namespace smite {
namespace {

constexpr double kZ95 = 1.96;

TuneResult TuneTrainingParameter(const std::string& parameter,
                                 std::span<const double> grid,
                                 const UpliftDataset& tuning_set,
                                 const SplitPlan& plan, const TrainConfig& base,
                                 std::size_t workers, bool is_alpha) {
  if (plan.repeats < 2) throw UsageError("tuning needs at least 2 repeats");
  SplitPlan folds_plan = plan;
  folds_plan.holdout_fraction = 0.0;
  const DatasetSplit split = Split(tuning_set, folds_plan);

  const FoldScorer scorer = [&](double value, std::size_t fold) {
    TrainConfig config = base;
    (is_alpha ? config.alpha : config.learning_rate) = value;
    config.seed = MixSeed(base.seed, 100 + fold);
    const auto& [train, valid] = split.folds[fold];
    return Train(config, train, valid).best_valid_qini;
  };
  return TuneGrid(parameter, grid, plan.repeats, scorer, workers);
}

}  // namespace

Vector AlphaGrid() {
  Vector grid;
  for (int i = 0; i <= 10; ++i) grid.push_back(i / 10.0);
  return grid;
}

Vector LearningRateGrid() { return {0.3, 0.1, 0.03, 0.01, 0.003}; }

TuneResult SelectByConfidence(
    const std::string& parameter, std::span<const double> grid,
    const std::vector<std::vector<std::optional<double>>>& fold_scores) {
  if (fold_scores.size() != grid.size()) {
    throw ShapeError("SelectByConfidence: " + std::to_string(grid.size()) +
                     " grid values but " + std::to_string(fold_scores.size()) +
                     " score lists");
  }
  TuneResult result;
  result.parameter = parameter;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    TuneCandidate c;
    c.value = grid[g];
    c.fold_scores = fold_scores[g];
    Vector ok;
    for (const auto& s : c.fold_scores) {
      if (s.has_value()) ok.push_back(*s);
    }
    c.successful_folds = ok.size();
    c.excluded = ok.empty();
    if (!c.excluded) {
      c.mean = Mean(ok);
      if (ok.size() >= 2) {
        const double se = SampleStdDev(ok) / std::sqrt(double(ok.size()));
        c.ci_lower = c.mean - kZ95 * se;
        c.ci_upper = c.mean + kZ95 * se;
      } else {
        c.ci_lower = -std::numeric_limits<double>::infinity();
        c.ci_upper = std::numeric_limits<double>::infinity();
      }
    }
    result.candidates.push_back(std::move(c));
  }

  const TuneCandidate* best = nullptr;
  for (const auto& c : result.candidates) {
    if (c.excluded || !(c.ci_lower > 0.0)) continue;
    if (best == nullptr || c.mean > best->mean) best = &c;
  }
  if (best == nullptr) {
    result.fallback = true;
    for (const auto& c : result.candidates) {
      if (c.excluded) continue;
      if (best == nullptr || c.ci_lower > best->ci_lower ||
          (c.ci_lower == best->ci_lower && c.mean > best->mean)) {
        best = &c;
      }
    }
  }
  if (best == nullptr) {
    throw NumericError("tuning " + parameter +
                       ": every fold of every candidate failed");
  }
  result.selected = best->value;
  return result;
}

TuneResult TuneGrid(const std::string& parameter, std::span<const double> grid,
                    std::size_t folds, const FoldScorer& scorer,
                    std::size_t workers) {
  std::vector<std::vector<std::optional<double>>> scores(
      grid.size(), std::vector<std::optional<double>>(folds));
  std::vector<std::string> errors(grid.size() * folds);
  ParallelFor(grid.size() * folds, workers, [&](std::size_t job) {
    const std::size_t g = job / folds;
    const std::size_t f = job % folds;
    try {
      scores[g][f] = scorer(grid[g], f);
    } catch (const std::exception& e) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "%s=%g fold=%zu: ", parameter.c_str(),
                    grid[g], f);
      errors[job] = buf + std::string(e.what());
    }
  });
  TuneResult result = SelectByConfidence(parameter, grid, scores);
  for (auto& e : errors) {
    if (!e.empty()) result.failures.push_back(std::move(e));
  }
  return result;
}

TuneResult TuneAlpha(const UpliftDataset& tuning_set, const SplitPlan& plan,
                     const TrainConfig& base, std::size_t workers) {
  const Vector grid = AlphaGrid();
  return TuneTrainingParameter("alpha", grid, tuning_set, plan, base, workers,
                               /*is_alpha=*/true);
}

TuneResult TuneLearningRate(const UpliftDataset& tuning_set,
                            const SplitPlan& plan, const TrainConfig& base,
                            std::size_t workers) {
  const Vector grid = LearningRateGrid();
  return TuneTrainingParameter("learning_rate", grid, tuning_set, plan, base,
                               workers, /*is_alpha=*/false);
}

}  // namespace smite
