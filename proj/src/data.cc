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

#include "smite/data.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <random>

#include "smite/errors.h"

namespace smite {
namespace {

std::string_view Trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(Trim(line.substr(start)));
      return fields;
    }
    fields.push_back(Trim(line.substr(start, comma - start)));
    start = comma + 1;
  }
}

bool ParseDouble(std::string_view text, double* value) {
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), *value);
  return ec == std::errc() && ptr == text.data() + text.size() &&
         std::isfinite(*value);
}

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

bool IsBinary(double v) { return v == 0.0 || v == 1.0; }

std::vector<std::size_t> ShuffledRange(std::size_t n, std::uint64_t seed) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(idx.begin(), idx.end(), rng);
  return idx;
}

std::size_t RoundedCount(std::size_t n, double fraction) {
  return static_cast<std::size_t>(std::llround(static_cast<double>(n) * fraction));
}

void RequireArms(const UpliftDataset& ds, std::span<const std::size_t> rows,
                 const std::string& part) {
  std::size_t treated = 0;
  for (std::size_t r : rows) treated += ds.treatment()[r] == 1.0;
  if (treated == 0 || treated == rows.size()) {
    throw StratificationError(part + " has " + std::to_string(treated) +
                              " treated rows out of " +
                              std::to_string(rows.size()) +
                              "; both arms are required");
  }
}

}  // namespace

UpliftDataset::UpliftDataset(Matrix features, Vector treatment, Vector outcome,
                             double propensity,
                             std::vector<std::string> feature_names)
    : features_(std::move(features)),
      treatment_(std::move(treatment)),
      outcome_(std::move(outcome)),
      propensity_(propensity),
      feature_names_(std::move(feature_names)) {
  if (treatment_.empty()) throw DataError("UpliftDataset: no rows");
  if (treatment_.size() != outcome_.size() ||
      features_.rows() != treatment_.size()) {
    throw ShapeError("UpliftDataset: features " + features_.ShapeString() +
                     ", " + std::to_string(treatment_.size()) +
                     " treatment flags, " + std::to_string(outcome_.size()) +
                     " outcomes");
  }
  for (std::size_t i = 0; i < treatment_.size(); ++i) {
    if (!IsBinary(treatment_[i]) || !IsBinary(outcome_[i])) {
      throw DataError("UpliftDataset: row " + std::to_string(i) +
                      " has a non-binary treatment or outcome");
    }
  }
  if (!(propensity_ > 0.0 && propensity_ < 1.0)) {
    throw DataError("UpliftDataset: propensity " + FormatDouble(propensity_) +
                    " is outside (0, 1)");
  }
  CheckFinite(features_.values(), "UpliftDataset features");
  if (feature_names_.empty()) {
    for (std::size_t j = 0; j < features_.cols(); ++j) {
      feature_names_.push_back("x" + std::to_string(j + 1));
    }
  } else if (feature_names_.size() != features_.cols()) {
    throw ShapeError("UpliftDataset: " + std::to_string(feature_names_.size()) +
                     " feature names for " + std::to_string(features_.cols()) +
                     " columns");
  }
}

std::size_t UpliftDataset::num_treated() const {
  return static_cast<std::size_t>(
      std::count(treatment_.begin(), treatment_.end(), 1.0));
}

UpliftDataset UpliftDataset::Subset(std::span<const std::size_t> indices) const {
  Vector t(indices.size());
  Vector y(indices.size());
  for (std::size_t i = 0; i < indices.size(); ++i) {
    t[i] = treatment_.at(indices[i]);
    y[i] = outcome_.at(indices[i]);
  }
  return UpliftDataset(features_.SelectRows(indices), std::move(t),
                       std::move(y), propensity_, feature_names_);
}

UpliftDataset UpliftDataset::WithFeatures(Matrix features) const {
  return UpliftDataset(std::move(features), treatment_, outcome_, propensity_,
                       feature_names_);
}

UpliftDataset UpliftDataset::WithPropensity(double propensity) const {
  return UpliftDataset(features_, treatment_, outcome_, propensity,
                       feature_names_);
}

void UpliftDataset::RequireBothArms(const std::string& part) const {
  const std::size_t treated = num_treated();
  if (treated == 0 || treated == size()) {
    throw StratificationError(part + " has " + std::to_string(treated) +
                              " treated rows out of " + std::to_string(size()) +
                              "; both arms are required");
  }
}

double EstimatePropensity(std::span<const double> treatment) {
  if (treatment.empty()) return 0.0;
  return std::accumulate(treatment.begin(), treatment.end(), 0.0) /
         static_cast<double>(treatment.size());
}

UpliftDataset LoadCsv(const std::string& path, const std::string& outcome_col,
                      const std::string& treatment_col,
                      std::optional<double> propensity) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");

  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty() || line.front() == '#') continue;
    for (auto f : SplitFields(line)) header.emplace_back(f);
    break;
  }
  if (header.empty()) throw ParseError(path + ": empty file");

  auto column_of = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw ParseError(path + ": missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t y_col = column_of(outcome_col);
  const std::size_t t_col = column_of(treatment_col);
  if (y_col == t_col) {
    throw ParseError(path + ": outcome and treatment name the same column");
  }
  std::vector<std::string> names;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != y_col && c != t_col) names.push_back(header[c]);
  }

  std::vector<double> cells;
  Vector t;
  Vector y;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty() || line.front() == '#') continue;
    const auto fields = SplitFields(line);
    if (fields.size() != header.size()) {
      throw ParseError(path + ":" + std::to_string(line_no) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(fields.size()));
    }
    for (std::size_t c = 0; c < fields.size(); ++c) {
      double v;
      if (!ParseDouble(fields[c], &v)) {
        throw ParseError(path + ":" + std::to_string(line_no) + ": column '" +
                         header[c] + "' is not a finite number: '" +
                         std::string(fields[c]) + "'");
      }
      if (c == y_col || c == t_col) {
        if (!IsBinary(v)) {
          throw ParseError(path + ":" + std::to_string(line_no) +
                           ": column '" + header[c] + "' must be 0 or 1, found '" +
                           std::string(fields[c]) + "'");
        }
        (c == y_col ? y : t).push_back(v);
      } else {
        cells.push_back(v);
      }
    }
  }
  if (t.empty()) throw ParseError(path + ": no data rows");

  const double e = propensity.value_or(EstimatePropensity(t));
  if (!(e > 0.0 && e < 1.0)) {
    throw DataError(path + ": propensity " + FormatDouble(e) +
                    " is outside (0, 1); both arms must be present");
  }
  const std::size_t n = t.size();
  const std::size_t p = names.size();
  return UpliftDataset(Matrix(n, p, std::move(cells)), std::move(t),
                       std::move(y), e, std::move(names));
}

void WriteCsv(const UpliftDataset& ds, const std::string& path,
              const std::string& outcome_col, const std::string& treatment_col,
              const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  for (const auto& c : comments) out << "# " << c << '\n';
  for (const auto& name : ds.feature_names()) out << name << ',';
  out << outcome_col << ',' << treatment_col << '\n';
  for (std::size_t i = 0; i < ds.size(); ++i) {
    for (double v : ds.features().Row(i)) out << FormatDouble(v) << ',';
    out << static_cast<int>(ds.outcome()[i]) << ','
        << static_cast<int>(ds.treatment()[i]) << '\n';
  }
  if (!out) throw ParseError("failed writing '" + path + "'");
}

Vector TransformOutcome(const UpliftDataset& ds) {
  const double e = ds.propensity();
  Vector z(ds.size());
  for (std::size_t i = 0; i < z.size(); ++i) {
    const double t = ds.treatment()[i];
    const double y = ds.outcome()[i];
    z[i] = t * y / e - (1.0 - t) * y / (1.0 - e);
  }
  return z;
}

Standardizer Standardizer::Fit(const Matrix& features) {
  const std::size_t n = features.rows();
  const std::size_t p = features.cols();
  Standardizer s{Vector(p, 0.0), Vector(p, 1.0)};
  if (n == 0) return s;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) s.mean[j] += features(i, j);
  }
  for (double& m : s.mean) m /= static_cast<double>(n);
  Vector ss(p, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      const double d = features(i, j) - s.mean[j];
      ss[j] += d * d;
    }
  }
  for (std::size_t j = 0; j < p; ++j) {
    const double sd = std::sqrt(ss[j] / static_cast<double>(n));
    s.scale[j] = sd > 1e-12 ? sd : 1.0;
  }
  return s;
}

Standardizer Standardizer::Identity(std::size_t num_features) {
  return Standardizer{Vector(num_features, 0.0), Vector(num_features, 1.0)};
}

Matrix Standardizer::Apply(const Matrix& features) const {
  if (features.cols() != mean.size()) {
    throw ShapeError("Standardizer: fitted on " + std::to_string(mean.size()) +
                     " features, applied to " + features.ShapeString());
  }
  Matrix out = features;
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto row = out.Row(i);
    for (std::size_t j = 0; j < row.size(); ++j) {
      row[j] = (row[j] - mean[j]) / scale[j];
    }
  }
  return out;
}

void SplitPlan::Validate() const {
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw UsageError("holdout_fraction must be in [0, 1)");
  }
  if (!(train_fraction_of_rest > 0.0 && train_fraction_of_rest < 1.0)) {
    throw UsageError("train_fraction must be in (0, 1)");
  }
  if (repeats < 1) throw UsageError("repeats must be >= 1");
}

SplitIndices MakeSplitIndices(const UpliftDataset& ds, const SplitPlan& plan) {
  plan.Validate();
  SplitIndices out;
  const auto order = ShuffledRange(ds.size(), MixSeed(plan.seed, 0));
  const std::size_t num_holdout = RoundedCount(ds.size(), plan.holdout_fraction);
  out.holdout.assign(order.begin(), order.begin() + num_holdout);
  out.rest.assign(order.begin() + num_holdout, order.end());
  std::sort(out.holdout.begin(), out.holdout.end());
  std::sort(out.rest.begin(), out.rest.end());
  if (!out.holdout.empty()) RequireArms(ds, out.holdout, "holdout");

  const std::size_t num_train =
      RoundedCount(out.rest.size(), plan.train_fraction_of_rest);
  for (std::size_t k = 0; k < plan.repeats; ++k) {
    const auto perm = ShuffledRange(out.rest.size(), MixSeed(plan.seed, k + 1));
    FoldIndices fold;
    for (std::size_t i = 0; i < perm.size(); ++i) {
      (i < num_train ? fold.train : fold.valid).push_back(out.rest[perm[i]]);
    }
    std::sort(fold.train.begin(), fold.train.end());
    std::sort(fold.valid.begin(), fold.valid.end());
    RequireArms(ds, fold.train, "fold " + std::to_string(k) + " train part");
    RequireArms(ds, fold.valid, "fold " + std::to_string(k) + " valid part");
    out.folds.push_back(std::move(fold));
  }
  return out;
}

DatasetSplit Split(const UpliftDataset& ds, const SplitPlan& plan) {
  const SplitIndices idx = MakeSplitIndices(ds, plan);
  DatasetSplit out;
  if (!idx.holdout.empty()) out.holdout = ds.Subset(idx.holdout);
  for (const auto& fold : idx.folds) {
    out.folds.emplace_back(ds.Subset(fold.train), ds.Subset(fold.valid));
  }
  return out;
}

UpliftDataset BalanceArms(const UpliftDataset& ds, std::uint64_t seed) {
  ds.RequireBothArms("BalanceArms input");
  std::vector<std::size_t> treated;
  std::vector<std::size_t> control;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (ds.treatment()[i] == 1.0 ? treated : control).push_back(i);
  }
  auto& major = treated.size() > control.size() ? treated : control;
  const std::size_t keep = std::min(treated.size(), control.size());
  std::mt19937_64 rng(seed);
  std::shuffle(major.begin(), major.end(), rng);
  major.resize(keep);
  std::vector<std::size_t> rows = treated;
  rows.insert(rows.end(), control.begin(), control.end());
  std::sort(rows.begin(), rows.end());
  return ds.Subset(rows).WithPropensity(0.5);
}

Vector ConditionalMeanModel::PredictUplift(const Matrix& features) const {
  const ConditionalMeans m = PredictConditionalMeans(features);
  return Sub(m.treated, m.control);
}

std::uint64_t MixSeed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace smite
