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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "smite/errors.h"
#include "smite/synthetic.h"
#include "test_util.h"

namespace smite {
namespace {

using ::smite::testing::ReadFile;
using ::smite::testing::TestDir;

// (score, t, y) rows of the hand example.
const Vector kScores = {0.9, 0.8, 0.2, 0.1};
const Vector kT = {1, 0, 1, 0};
const Vector kY = {1, 0, 0, 1};

// Brute-force f(phi): rank, take the top ceil(phi n) rows, count.
double OracleF(const Vector& s, const Vector& t, const Vector& y, double phi) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return s[a] != s[b] ? s[a] > s[b] : a < b;
  });
  const auto m = static_cast<std::size_t>(std::ceil(phi * s.size() - 1e-9));
  double yt = 0, yc = 0, nt = 0, nc = 0, all_t = 0;
  for (double v : t) all_t += v;
  for (std::size_t r = 0; r < m; ++r) {
    const std::size_t i = idx[r];
    if (t[i] == 1) {
      yt += y[i];
      ++nt;
    } else {
      yc += y[i];
      ++nc;
    }
  }
  if (m == 0) return 0.0;
  return (yt - yc * nt / nc) / all_t;
}

// Left Riemann sum of Q = f - phi f(1) on a K-point grid. Rows are ranked
// once and the top-m counts grow with phi.
double RiemannQini(const Vector& s, const Vector& t, const Vector& y, int k) {
  std::vector<std::size_t> idx(s.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return s[a] != s[b] ? s[a] > s[b] : a < b;
  });
  const double f1 = OracleF(s, t, y, 1.0);
  double all_t = 0;
  for (double v : t) all_t += v;
  double yt = 0, yc = 0, nt = 0, nc = 0, area = 0;
  std::size_t taken = 0;
  for (int i = 0; i < k; ++i) {
    const double phi = static_cast<double>(i) / k;
    const auto m = static_cast<std::size_t>(std::ceil(phi * s.size() - 1e-9));
    for (; taken < m; ++taken) {
      const std::size_t r = idx[taken];
      if (t[r] == 1) {
        yt += y[r];
        ++nt;
      } else {
        yc += y[r];
        ++nc;
      }
    }
    const double f = m == 0 ? 0.0 : (yt - (nc > 0 ? yc * nt / nc : 0.0)) / all_t;
    area += (f - phi * f1) / k;
  }
  return area;
}

TEST(QiniCurveTest, HandExample) {
  const QiniCurve curve = ComputeQiniCurve(kScores, kT, kY, 2);
  EXPECT_EQ(curve.grid, (Vector{0, 0.5, 1}));
  EXPECT_NEAR(curve.f_values[0], 0.0, 1e-12);
  EXPECT_NEAR(curve.f_values[1], 0.5, 1e-12);
  EXPECT_NEAR(curve.f_values[2], 0.0, 1e-12);
  EXPECT_NEAR(QiniCoefficient(curve), 0.25, 1e-12);
  EXPECT_TRUE(curve.interpolated.empty());
}

TEST(QiniCurveTest, ConstantOutcomeGivesFlatCurve) {
  const Vector y(4, 0.0);
  const QiniCurve curve = ComputeQiniCurve(kScores, kT, y, 10);
  for (double f : curve.f_values) EXPECT_EQ(f, 0.0);
  EXPECT_EQ(QiniCoefficient(curve), 0.0);
}

TEST(QiniCurveTest, EndpointIsTheAverageTreatmentEffect) {
  const ParametricSample s = GenerateParametric(DefaultSyntheticSpec(3000, 5, 2));
  const UpliftDataset& ds = s.dataset;
  const QiniCurve curve =
      ComputeQiniCurve(s.true_uplift, ds.treatment(), ds.outcome(), 50);
  double y1 = 0, y0 = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (ds.treatment()[i] == 1 ? y1 : y0) += ds.outcome()[i];
  }
  const double ate = y1 / ds.num_treated() - y0 / ds.num_control();
  EXPECT_NEAR(curve.f_values.back(), ate, 1e-12);
  EXPECT_EQ(curve.q_values.back(), 0.0);
}

TEST(QiniCurveTest, MatchesBruteForceOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 1);
  Vector s(200), t(200), y(200);
  for (std::size_t i = 0; i < 200; ++i) {
    s[i] = std::round(u(rng) * 20) / 20;  // many ties
    t[i] = u(rng) < 0.5;
    y[i] = u(rng) < 0.2 + 0.3 * s[i] * t[i];
  }
  const QiniCurve curve = ComputeQiniCurve(s, t, y, 40);
  for (std::size_t k = 0; k <= 40; ++k) {
    if (std::find(curve.interpolated.begin(), curve.interpolated.end(), k) !=
        curve.interpolated.end()) {
      continue;
    }
    EXPECT_NEAR(curve.f_values[k], OracleF(s, t, y, k / 40.0), 1e-12) << k;
  }
}

TEST(QiniCurveTest, LiteralFormulaDropsTheArmRatio) {
  // Top half holds 1 treated and 1 control row, whole sample 2 treated.
  const QiniCurve lit = ComputeQiniCurve(kScores, kT, kY, 2, QiniFormula::kLiteral);
  EXPECT_NEAR(lit.f_values[1], (1.0 - 0.0 / 1.0) / 2.0, 1e-12);
  EXPECT_NEAR(lit.f_values[2], (1.0 - 1.0 / 2.0) / 2.0, 1e-12);
}

TEST(QiniCurveTest, MissingControlsAreInterpolatedAndFlagged) {
  const Vector s = {0.9, 0.8, 0.7, 0.6};
  const Vector t = {1, 1, 0, 0};
  const Vector y = {1, 0, 1, 0};
  const QiniCurve curve = ComputeQiniCurve(s, t, y, 4);
  EXPECT_EQ(curve.interpolated, (std::vector<std::size_t>{1, 2}));
  // Valid neighbours are f(0) = 0 and f(0.75).
  const double f3 = curve.f_values[3];
  EXPECT_NEAR(curve.f_values[1], f3 / 3, 1e-12);
  EXPECT_NEAR(curve.f_values[2], 2 * f3 / 3, 1e-12);
}

TEST(QiniCurveTest, Errors) {
  EXPECT_THROW(ComputeQiniCurve(kScores, Vector{1, 0}, kY, 2), ShapeError);
  EXPECT_THROW(ComputeQiniCurve(kScores, Vector{1, 1, 1, 1}, kY, 2),
               StratificationError);
}

TEST(QiniCoefficientTest, ZeroCurveHasZeroArea) {
  QiniCurve curve;
  curve.grid = {0, 0.5, 1};
  curve.f_values = {0, 0, 0};
  curve.q_values = {0, 0, 0};
  EXPECT_EQ(QiniCoefficient(curve), 0.0);
}

TEST(QiniCoefficientTest, AgreesWithFineRiemannOracle) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const ParametricSample s =
        GenerateParametric(DefaultSyntheticSpec(20000, 10, seed));
    const UpliftDataset& ds = s.dataset;
    const double q = QiniCoefficient(
        ComputeQiniCurve(s.true_uplift, ds.treatment(), ds.outcome(), 100));
    const double oracle =
        RiemannQini(s.true_uplift, ds.treatment(), ds.outcome(), 10000);
    EXPECT_NEAR(q, oracle, 1e-3) << "seed " << seed;
    const double doubled = QiniCoefficient(
        ComputeQiniCurve(s.true_uplift, ds.treatment(), ds.outcome(), 200));
    EXPECT_NEAR(q, doubled, 1e-3);
  }
}

TEST(KendallTest, HandExampleTwoBins) {
  const KendallResult r = KendallUpliftCorrelation(kScores, kT, kY, 2);
  EXPECT_NEAR(r.rho, 1.0, 1e-12);
  EXPECT_EQ(r.bins_used, 2u);
  EXPECT_NEAR(r.observed_uplift[0], 1.0, 1e-12);
  EXPECT_NEAR(r.observed_uplift[1], -1.0, 1e-12);
}

TEST(KendallTest, ReversedObservedUpliftGivesMinusOne) {
  // Three bins of two rows, predicted order high to low, observed low to high.
  const Vector s = {0.9, 0.85, 0.5, 0.45, 0.1, 0.05};
  const Vector t = {1, 0, 1, 0, 1, 0};
  const Vector y = {0, 1, 0, 0, 1, 0};
  const KendallResult r = KendallUpliftCorrelation(s, t, y, 3);
  EXPECT_NEAR(r.rho, -1.0, 1e-12);
}

TEST(KendallTest, TwoBinsIsSignOfOnePair) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 20; ++trial) {
    Vector s(40), t(40), y(40);
    for (std::size_t i = 0; i < 40; ++i) {
      s[i] = u(rng);
      t[i] = i % 2;
      y[i] = u(rng) < 0.4;
    }
    const double rho = KendallUpliftCorrelation(s, t, y, 2).rho;
    EXPECT_TRUE(rho == -1.0 || rho == 0.0 || rho == 1.0) << rho;
  }
}

TEST(KendallTest, BinWithoutControlsIsMergedTowardMedian) {
  // First bin holds only treated rows and merges into the second.
  const Vector s = {0.9, 0.8, 0.7, 0.6, 0.5, 0.4};
  const Vector t = {1, 1, 1, 0, 1, 0};
  const Vector y = {1, 1, 0, 0, 1, 0};
  const KendallResult r = KendallUpliftCorrelation(s, t, y, 3);
  EXPECT_EQ(r.bins_requested, 3u);
  EXPECT_EQ(r.bins_used, 2u);
  EXPECT_NEAR(r.mean_predicted[0], (0.9 + 0.8 + 0.7 + 0.6) / 4, 1e-12);
}

TEST(KendallTest, TiesStayInOneBin) {
  // The tie across the middle boundary moves wholly into the lower bin.
  const Vector s = {0.9, 0.8, 0.5, 0.5, 0.2, 0.1};
  const Vector t = {1, 0, 1, 0, 1, 0};
  const Vector y = {1, 0, 1, 1, 0, 0};
  const KendallResult r = KendallUpliftCorrelation(s, t, y, 2);
  EXPECT_NEAR(r.mean_predicted[0], 0.85, 1e-12);
  EXPECT_NEAR(r.mean_predicted[1], (0.5 + 0.5 + 0.2 + 0.1) / 4, 1e-12);
}

TEST(SummarizeTest, TwoPointArithmetic) {
  const Summary s = Summarize(Vector{0.1, 0.3});
  EXPECT_NEAR(s.mean, 0.2, 1e-15);
  EXPECT_NEAR(s.two_se, 0.2, 1e-15);
  EXPECT_EQ(Summarize(Vector{0.4, 0.4, 0.4}).two_se, 0.0);
  EXPECT_THROW(Summarize(Vector{0.4}), UsageError);
}

TEST(SummarizeTest, ThirtyRunsMatchHandFormula) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal(0.3, 0.1);
  Vector v(30);
  for (double& x : v) x = normal(rng);
  double mean = 0;
  for (double x : v) mean += x / 30;
  double ss = 0;
  for (double x : v) ss += (x - mean) * (x - mean);
  const Summary s = Summarize(v);
  EXPECT_NEAR(s.mean, mean, 1e-14);
  EXPECT_NEAR(s.two_se, 2 * std::sqrt(ss / 29) / std::sqrt(30.0), 1e-14);
}

TEST(EvaluateTest, ReportsFlagsAndAggregates) {
  const EvalReport r = Evaluate(kScores, kT, kY, {2, 2, QiniFormula::kCorrected});
  EXPECT_NEAR(r.qini, 0.25, 1e-12);
  EXPECT_NEAR(r.kendall, 1.0, 1e-12);
  const std::vector<EvalReport> runs = {r, r};
  const AggregateReport agg = Aggregate(runs);
  EXPECT_EQ(agg.qini.two_se, 0.0);
  EXPECT_EQ(agg.runs.size(), 2u);
}

TEST(WriteQiniCurveCsvTest, HeaderAndRows) {
  const auto dir = TestDir();
  WriteQiniCurveCsv(ComputeQiniCurve(kScores, kT, kY, 2),
                    (dir / "c.csv").string(), {"seed=1"});
  EXPECT_EQ(ReadFile(dir / "c.csv"), "# seed=1\nphi,f,q\n0,0,0\n0.5,0.5,0.5\n1,0,0\n");
}

}  // namespace
}  // namespace smite
