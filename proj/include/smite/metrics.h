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

// Uplift goodness-of-fit measures.
//
// Rows are ranked by predicted uplift (descending, ties broken by original
// row index). For a targeted fraction phi, N_phi is the top ceil(phi * n)
// rows and
//
//   f(phi) = (1 / n_t) * (sum_N y t - sum_N y (1 - t) * sum_N t / sum_N (1 - t))
//
// so f(1) is the difference of the treated and control response rates. The
// Qini coefficient is the trapezoid-rule area under Q(phi) = f(phi) - phi f(1).
// The Kendall uplift rank correlation compares the ordering of per-bin mean
// predicted uplift against the per-bin observed uplift.

#ifndef SMITE_METRICS_H_
#define SMITE_METRICS_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "smite/numerics.h"

namespace smite {

enum class QiniFormula {
  kCorrected,  // control responses rescaled by sum_N t / sum_N (1 - t)
  kLiteral,    // control responses divided by sum_N (1 - t) only
};

struct QiniCurve {
  Vector grid;      // phi_k, ascending, from 0 to 1
  Vector f_values;  // f(phi_k)
  Vector q_values;  // Q(phi_k) = f(phi_k) - phi_k f(1)
  // Grid positions whose N_phi had no control rows; their f was linearly
  // interpolated from the nearest valid neighbours.
  std::vector<std::size_t> interpolated;
};

// Uniform grid of grid_size + 1 points. Throws ShapeError on length
// mismatches and StratificationError when the whole sample lacks an arm.
QiniCurve ComputeQiniCurve(std::span<const double> predicted_uplift,
                           std::span<const double> t, std::span<const double> y,
                           std::size_t grid_size,
                           QiniFormula formula = QiniFormula::kCorrected);

// Trapezoid rule over the curve's own grid.
double QiniCoefficient(const QiniCurve& curve);

struct KendallResult {
  double rho = 0.0;
  std::size_t bins_requested = 0;
  std::size_t bins_used = 0;  // < bins_requested after merging
  Vector mean_predicted;      // per bin, highest predicted uplift first
  Vector observed_uplift;     // per bin
};

// Splits the ranked rows into `bins` nearly equal consecutive groups. A bin
// lacking an arm is merged into its neighbour toward the median and the
// statistic is computed on the reduced set of bins. Throws StratificationError
// when fewer than two valid bins remain.
KendallResult KendallUpliftCorrelation(std::span<const double> predicted_uplift,
                                       std::span<const double> t,
                                       std::span<const double> y,
                                       std::size_t bins);

struct MetricOptions {
  std::size_t qini_grid = 100;
  std::size_t kendall_bins = 10;
  QiniFormula formula = QiniFormula::kCorrected;
};

struct EvalReport {
  double qini = 0.0;
  double kendall = 0.0;
  // Set when the Qini curve needed interpolation or Kendall bins were merged.
  bool qini_interpolated = false;
  bool kendall_merged = false;
};

EvalReport Evaluate(std::span<const double> predicted_uplift,
                    std::span<const double> t, std::span<const double> y,
                    const MetricOptions& options = {});

// Mean and two standard errors (sample std / sqrt(runs)) of one statistic.
struct Summary {
  double mean = 0.0;
  double two_se = 0.0;
  std::size_t runs = 0;
};

// Throws UsageError for fewer than two values.
Summary Summarize(std::span<const double> values);

struct AggregateReport {
  Summary qini;
  Summary kendall;
  std::vector<EvalReport> runs;
};

AggregateReport Aggregate(std::span<const EvalReport> runs);

// CSV with header "phi,f,q"; each comment line is written first as "# ...".
void WriteQiniCurveCsv(const QiniCurve& curve, const std::string& path,
                       const std::vector<std::string>& comments = {});

}  // namespace smite

#endif  // SMITE_METRICS_H_
