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

#ifndef SMITE_DATA_H_
#define SMITE_DATA_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smite/numerics.h"

namespace smite {

// Randomized-trial data: covariates, binary treatment flags, binary outcomes
// and a constant propensity score. Immutable once built.
class UpliftDataset {
 public:
  // Throws ShapeError on inconsistent lengths and DataError when a label is
  // not 0/1, the propensity is outside (0, 1) or there are no rows.
  UpliftDataset(Matrix features, Vector treatment, Vector outcome,
                double propensity, std::vector<std::string> feature_names = {});

  const Matrix& features() const { return features_; }
  const Vector& treatment() const { return treatment_; }
  const Vector& outcome() const { return outcome_; }
  double propensity() const { return propensity_; }
  const std::vector<std::string>& feature_names() const {
    return feature_names_;
  }

  std::size_t size() const { return treatment_.size(); }
  std::size_t num_features() const { return features_.cols(); }
  std::size_t num_treated() const;
  std::size_t num_control() const { return size() - num_treated(); }

  // Rows in the given order; keeps the propensity and feature names.
  UpliftDataset Subset(std::span<const std::size_t> indices) const;
  // Same labels with replaced covariates (e.g. after standardization).
  UpliftDataset WithFeatures(Matrix features) const;
  UpliftDataset WithPropensity(double propensity) const;

  // Throws StratificationError mentioning `part` if an arm is empty.
  void RequireBothArms(const std::string& part) const;

 private:
  Matrix features_;
  Vector treatment_;
  Vector outcome_;
  double propensity_;
  std::vector<std::string> feature_names_;
};

// Fraction of treated rows.
double EstimatePropensity(std::span<const double> treatment);

// Reads a header-first, comma-separated file. Every column other than the
// outcome and treatment columns is a covariate. Lines starting with '#' are
// ignored. Without an explicit propensity it is estimated as the treated
// fraction.
UpliftDataset LoadCsv(const std::string& path, const std::string& outcome_col,
                      const std::string& treatment_col,
                      std::optional<double> propensity = std::nullopt);

// Writes covariates then the outcome and treatment columns. Values use 17
// significant digits so LoadCsv restores them exactly. Each comment line is
// written first, prefixed by "# ".
void WriteCsv(const UpliftDataset& ds, const std::string& path,
              const std::string& outcome_col = "y",
              const std::string& treatment_col = "t",
              const std::vector<std::string>& comments = {});

// z_i = t_i y_i / e - (1 - t_i) y_i / (1 - e).
Vector TransformOutcome(const UpliftDataset& ds);

// Per-feature centering and scaling, fitted on one part and applied to the
// others. Zero-variance features keep a unit scale.
struct Standardizer {
  Vector mean;
  Vector scale;

  static Standardizer Fit(const Matrix& features);
  static Standardizer Identity(std::size_t num_features);
  Matrix Apply(const Matrix& features) const;
};

struct SplitPlan {
  // Zero disables the holdout part.
  double holdout_fraction = 0.30;
  double train_fraction_of_rest = 0.60;
  std::size_t repeats = 10;
  std::uint64_t seed = 0;

  // Throws UsageError naming the offending field.
  void Validate() const;
};

struct FoldIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> valid;
};

// Row indices into the source dataset.
struct SplitIndices {
  std::vector<std::size_t> holdout;
  std::vector<std::size_t> rest;
  std::vector<FoldIndices> folds;
};

struct DatasetSplit {
  std::optional<UpliftDataset> holdout;
  std::vector<std::pair<UpliftDataset, UpliftDataset>> folds;
};

// Draws the holdout once from plan.seed, then `repeats` independent
// train/valid shuffles of the remainder. Throws StratificationError if any
// part lacks an arm.
SplitIndices MakeSplitIndices(const UpliftDataset& ds, const SplitPlan& plan);
DatasetSplit Split(const UpliftDataset& ds, const SplitPlan& plan);

// Down-samples the majority arm so both arms have equal size; the result has
// propensity exactly 1/2. Row order is preserved.
UpliftDataset BalanceArms(const UpliftDataset& ds, std::uint64_t seed);

struct ConditionalMeans {
  Vector control;  // m0(x)
  Vector treated;  // m1(x)
};

// Anything that predicts Pr(Y = 1 | T, x) for both arms.
class ConditionalMeanModel {
 public:
  virtual ~ConditionalMeanModel() = default;
  // `features` are raw (unstandardized) covariates.
  virtual ConditionalMeans PredictConditionalMeans(
      const Matrix& features) const = 0;

  Vector PredictUplift(const Matrix& features) const;
};

// Deterministic 64-bit seed derivation (splitmix64 of base and stream).
std::uint64_t MixSeed(std::uint64_t base, std::uint64_t stream);

}  // namespace smite

#endif  // SMITE_DATA_H_
