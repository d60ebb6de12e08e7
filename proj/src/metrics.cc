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

#include "smite/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

#include "smite/errors.h"

namespace smite {
namespace {

void CheckInputs(std::span<const double> scores, std::span<const double> t,
                 std::span<const double> y, const char* what) {
  if (t.size() != scores.size() || y.size() != scores.size()) {
    throw ShapeError(std::string(what) + ": " + std::to_string(scores.size()) +
                     " scores, " + std::to_string(t.size()) +
                     " treatment flags, " + std::to_string(y.size()) +
                     " outcomes");
  }
  if (scores.empty()) throw ShapeError(std::string(what) + ": no rows");
  CheckFinite(scores, what);
}

// Row indices by descending score; equal scores keep their original order.
std::vector<std::size_t> RankDescending(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return scores[a] > scores[b];
  });
  return order;
}

int Sign(double v) { return (v > 0) - (v < 0); }

std::string FormatDouble(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct Bin {
  std::size_t begin;
  std::size_t end;
};

}  // namespace

QiniCurve ComputeQiniCurve(std::span<const double> predicted_uplift,
                           std::span<const double> t, std::span<const double> y,
                           std::size_t grid_size, QiniFormula formula) {
  CheckInputs(predicted_uplift, t, y, "ComputeQiniCurve");
  if (grid_size < 1) throw UsageError("Qini grid size must be >= 1");
  const std::size_t n = predicted_uplift.size();
  const auto order = RankDescending(predicted_uplift);

  // Prefix sums over the ranking; index m covers the top m rows.
  std::vector<double> yt(n + 1, 0.0), yc(n + 1, 0.0), nt(n + 1, 0.0),
      nc(n + 1, 0.0);
  for (std::size_t m = 0; m < n; ++m) {
    const std::size_t i = order[m];
    yt[m + 1] = yt[m] + y[i] * t[i];
    yc[m + 1] = yc[m] + y[i] * (1.0 - t[i]);
    nt[m + 1] = nt[m] + t[i];
    nc[m + 1] = nc[m] + (1.0 - t[i]);
  }
  if (nt[n] == 0.0 || nc[n] == 0.0) {
    throw StratificationError(
        "ComputeQiniCurve: both treated and control rows are required");
  }

  const std::size_t k_max = grid_size;
  QiniCurve curve;
  curve.grid.resize(k_max + 1);
  curve.f_values.assign(k_max + 1, 0.0);
  std::vector<bool> valid(k_max + 1, true);
  for (std::size_t k = 0; k <= k_max; ++k) {
    curve.grid[k] = static_cast<double>(k) / static_cast<double>(k_max);
    // ceil(k n / K) without floating point.
    const std::size_t m = (k * n + k_max - 1) / k_max;
    if (m == 0) continue;  // f(0) = 0
    if (nc[m] == 0.0) {
      valid[k] = false;
      continue;
    }
    const double control_term = formula == QiniFormula::kCorrected
                                    ? yc[m] * nt[m] / nc[m]
                                    : yc[m] / nc[m];
    curve.f_values[k] = (yt[m] - control_term) / nt[n];
  }
  curve.grid.back() = 1.0;

  for (std::size_t k = 0; k <= k_max; ++k) {
    if (valid[k]) continue;
    std::size_t a = k;
    while (!valid[a]) --a;  // k = 0 is always valid
    std::size_t b = k;
    while (!valid[b]) ++b;  // k = K is always valid
    const double w = (curve.grid[k] - curve.grid[a]) /
                     (curve.grid[b] - curve.grid[a]);
    curve.f_values[k] =
        curve.f_values[a] + w * (curve.f_values[b] - curve.f_values[a]);
    curve.interpolated.push_back(k);
  }

  const double f1 = curve.f_values.back();
  curve.q_values.resize(k_max + 1);
  for (std::size_t k = 0; k <= k_max; ++k) {
    curve.q_values[k] = curve.f_values[k] - curve.grid[k] * f1;
  }
  curve.q_values.back() = 0.0;
  return curve;
}

double QiniCoefficient(const QiniCurve& curve) {
  if (curve.grid.size() != curve.q_values.size()) {
    throw ShapeError("QiniCoefficient: grid and Q values differ in length");
  }
  double area = 0.0;
  for (std::size_t k = 0; k + 1 < curve.grid.size(); ++k) {
    area += (curve.grid[k + 1] - curve.grid[k]) *
            (curve.q_values[k + 1] + curve.q_values[k]);
  }
  return 0.5 * area;
}

KendallResult KendallUpliftCorrelation(std::span<const double> predicted_uplift,
                                       std::span<const double> t,
                                       std::span<const double> y,
                                       std::size_t bins) {
  CheckInputs(predicted_uplift, t, y, "KendallUpliftCorrelation");
  if (bins < 2) throw UsageError("Kendall bins must be >= 2");
  const std::size_t n = predicted_uplift.size();
  const auto order = RankDescending(predicted_uplift);
  auto score_at = [&](std::size_t pos) { return predicted_uplift[order[pos]]; };

  // Nearly equal consecutive groups; a run of ties straddling a boundary
  // moves entirely into the lower-uplift bin.
  std::vector<std::size_t> cuts(bins + 1);
  for (std::size_t b = 0; b <= bins; ++b) cuts[b] = b * n / bins;
  for (std::size_t b = 1; b < bins; ++b) {
    while (cuts[b] > cuts[b - 1] && cuts[b] < n &&
           score_at(cuts[b] - 1) == score_at(cuts[b])) {
      --cuts[b];
    }
  }
  std::vector<Bin> groups;
  for (std::size_t b = 0; b < bins; ++b) groups.push_back({cuts[b], cuts[b + 1]});

  auto has_both_arms = [&](const Bin& g) {
    bool treated = false;
    bool control = false;
    for (std::size_t pos = g.begin; pos < g.end; ++pos) {
      (t[order[pos]] == 1.0 ? treated : control) = true;
    }
    return treated && control;
  };

  while (true) {
    if (groups.size() < 2) {
      throw StratificationError(
          "KendallUpliftCorrelation: fewer than two bins contain both arms");
    }
    std::size_t bad = groups.size();
    for (std::size_t g = 0; g < groups.size(); ++g) {
      if (!has_both_arms(groups[g])) {
        bad = g;
        break;
      }
    }
    if (bad == groups.size()) break;
    const double median = 0.5 * static_cast<double>(groups.size() - 1);
    const bool toward_next =
        static_cast<double>(bad) < median ||
        (static_cast<double>(bad) == median && bad + 1 < groups.size());
    const std::size_t keep = toward_next ? bad : bad - 1;
    groups[keep].end = groups[keep + 1].end;
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(keep) + 1);
  }

  KendallResult result;
  result.bins_requested = bins;
  result.bins_used = groups.size();
  for (const Bin& g : groups) {
    double score_sum = 0.0, yt = 0.0, nt = 0.0, yc = 0.0, nc = 0.0;
    for (std::size_t pos = g.begin; pos < g.end; ++pos) {
      const std::size_t i = order[pos];
      score_sum += predicted_uplift[i];
      if (t[i] == 1.0) {
        yt += y[i];
        nt += 1.0;
      } else {
        yc += y[i];
        nc += 1.0;
      }
    }
    result.mean_predicted.push_back(score_sum /
                                    static_cast<double>(g.end - g.begin));
    result.observed_uplift.push_back(yt / nt - yc / nc);
  }

  const std::size_t b = groups.size();
  long long agreement = 0;
  for (std::size_t i = 0; i < b; ++i) {
    for (std::size_t j = i + 1; j < b; ++j) {
      agreement +=
          Sign(result.mean_predicted[i] - result.mean_predicted[j]) *
          Sign(result.observed_uplift[i] - result.observed_uplift[j]);
    }
  }
  result.rho = 2.0 * static_cast<double>(agreement) /
               (static_cast<double>(b) * static_cast<double>(b - 1));
  return result;
}

EvalReport Evaluate(std::span<const double> predicted_uplift,
                    std::span<const double> t, std::span<const double> y,
                    const MetricOptions& options) {
  const QiniCurve curve =
      ComputeQiniCurve(predicted_uplift, t, y, options.qini_grid, options.formula);
  const KendallResult kendall =
      KendallUpliftCorrelation(predicted_uplift, t, y, options.kendall_bins);
  EvalReport report;
  report.qini = QiniCoefficient(curve);
  report.kendall = kendall.rho;
  report.qini_interpolated = !curve.interpolated.empty();
  report.kendall_merged = kendall.bins_used < kendall.bins_requested;
  return report;
}

Summary Summarize(std::span<const double> values) {
  if (values.size() < 2) {
    throw UsageError("aggregation needs at least two runs, got " +
                     std::to_string(values.size()));
  }
  Summary s;
  s.runs = values.size();
  s.mean = Mean(values);
  s.two_se = 2.0 * SampleStdDev(values) /
             std::sqrt(static_cast<double>(values.size()));
  return s;
}

AggregateReport Aggregate(std::span<const EvalReport> runs) {
  Vector qini;
  Vector kendall;
  for (const auto& r : runs) {
    qini.push_back(r.qini);
    kendall.push_back(r.kendall);
  }
  AggregateReport out;
  out.qini = Summarize(qini);
  out.kendall = Summarize(kendall);
  out.runs.assign(runs.begin(), runs.end());
  return out;
}

void WriteQiniCurveCsv(const QiniCurve& curve, const std::string& path,
                       const std::vector<std::string>& comments) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write '" + path + "'");
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "phi,f,q\n";
  for (std::size_t k = 0; k < curve.grid.size(); ++k) {
    out << FormatDouble(curve.grid[k]) << ',' << FormatDouble(curve.f_values[k])
        << ',' << FormatDouble(curve.q_values[k]) << '\n';
  }
}

}  // namespace smite
