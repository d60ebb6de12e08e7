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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "smite/errors.h"

namespace smite {
namespace {

double Logistic(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// Treated-minus-control response rate with its standard error.
struct Ate {
  double value;
  double se;
};

Ate EmpiricalAte(const UpliftDataset& ds) {
  double n1 = 0, n0 = 0, y1 = 0, y0 = 0;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    if (ds.treatment()[i] == 1.0) {
      ++n1;
      y1 += ds.outcome()[i];
    } else {
      ++n0;
      y0 += ds.outcome()[i];
    }
  }
  const double p1 = y1 / n1, p0 = y0 / n0;
  return {p1 - p0, std::sqrt(p1 * (1 - p1) / n1 + p0 * (1 - p0) / n0)};
}

// Conditional means fixed per row index of the source dataset.
class TableModel : public ConditionalMeanModel {
 public:
  TableModel(double control, double treated)
      : control_(control), treated_(treated) {}
  ConditionalMeans PredictConditionalMeans(const Matrix& x) const override {
    return {Vector(x.rows(), control_), Vector(x.rows(), treated_)};
  }

 private:
  double control_;
  double treated_;
};

TEST(DefaultSyntheticSpecTest, CoefficientShapes) {
  const SyntheticSpec spec = DefaultSyntheticSpec(100, 40, 3);
  ASSERT_EQ(spec.baseline_coeffs.size(), 40u);
  ASSERT_EQ(spec.uplift_coeffs.size(), 40u);
  std::size_t nonzero = 0;
  for (double g : spec.uplift_coeffs) {
    if (g != 0.0) {
      ++nonzero;
      EXPECT_DOUBLE_EQ(std::abs(g), 0.5);
    }
  }
  EXPECT_EQ(nonzero, 4u);
  EXPECT_DOUBLE_EQ(spec.uplift_intercept, 0.05);
}

TEST(DefaultSyntheticSpecTest, InterceptHitsBaseRate) {
  // E[sigmoid(b0 + s Z)] by a fine midpoint rule on [-10, 10].
  for (double s : {0.0, 0.5, 1.0, 2.0}) {
    const double b0 = SolveBaselineIntercept(s, 0.1);
    double mass = 0.0;
    const int steps = 20000;
    const double h = 20.0 / steps;
    for (int k = 0; k < steps; ++k) {
      const double z = -10.0 + (k + 0.5) * h;
      mass += Logistic(b0 + s * z) * std::exp(-0.5 * z * z) * h;
    }
    EXPECT_NEAR(mass / std::sqrt(2 * M_PI), 0.1, 1e-6) << "s=" << s;
  }
}

TEST(GenerateParametricTest, ZeroUpliftCoefficientsGiveZeroTruth) {
  SyntheticSpec spec = DefaultSyntheticSpec(200, 5, 1);
  std::fill(spec.uplift_coeffs.begin(), spec.uplift_coeffs.end(), 0.0);
  spec.uplift_intercept = 0.0;
  const ParametricSample s = GenerateParametric(spec);
  for (double u : s.true_uplift) EXPECT_EQ(u, 0.0);
}

TEST(GenerateParametricTest, TruthMatchesClosedForm) {
  const SyntheticSpec spec = DefaultSyntheticSpec(50, 6, 2);
  const ParametricSample s = GenerateParametric(spec);
  for (std::size_t i = 0; i < 50; ++i) {
    const auto x = s.dataset.features().Row(i);
    double base = spec.baseline_intercept, lift = spec.uplift_intercept;
    for (std::size_t j = 0; j < 6; ++j) {
      base += x[j] * spec.baseline_coeffs[j];
      lift += x[j] * spec.uplift_coeffs[j];
    }
    EXPECT_NEAR(s.true_uplift[i], Logistic(base + lift) - Logistic(base),
                1e-12);
  }
}

TEST(GenerateParametricTest, EmpiricalAteMatchesMeanTruth) {
  const ParametricSample s = GenerateParametric(DefaultSyntheticSpec(20000, 10, 9));
  const Ate ate = EmpiricalAte(s.dataset);
  const double truth = std::accumulate(s.true_uplift.begin(), s.true_uplift.end(), 0.0) /
                       s.true_uplift.size();
  EXPECT_NEAR(ate.value, truth, 3 * ate.se);
  EXPECT_DOUBLE_EQ(s.dataset.propensity(), 0.5);
}

TEST(GenerateParametricTest, Deterministic) {
  const SyntheticSpec spec = DefaultSyntheticSpec(300, 4, 5);
  const ParametricSample a = GenerateParametric(spec);
  const ParametricSample b = GenerateParametric(spec);
  EXPECT_EQ(a.dataset.features(), b.dataset.features());
  EXPECT_EQ(a.dataset.outcome(), b.dataset.outcome());
  EXPECT_EQ(a.dataset.treatment(), b.dataset.treatment());
  const ParametricSample c = GenerateParametric(DefaultSyntheticSpec(300, 4, 6));
  EXPECT_NE(a.dataset.features(), c.dataset.features());
}

TEST(SyntheticSpecTest, ValidateNamesField) {
  SyntheticSpec spec = DefaultSyntheticSpec(10, 3, 0);
  spec.uplift_coeffs.pop_back();
  try {
    spec.Validate();
    FAIL();
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("uplift"), std::string::npos);
  }
}

TEST(GenerateBootstrapTest, PreservesSizeAndTracksModelAte) {
  const ParametricSample src = GenerateParametric(DefaultSyntheticSpec(20000, 3, 4));
  const TableModel model(0.2, 0.35);
  const UpliftDataset boot = GenerateBootstrap(src.dataset, model, 8);
  EXPECT_EQ(boot.size(), src.dataset.size());
  const Ate ate = EmpiricalAte(boot);
  EXPECT_NEAR(ate.value, 0.15, 3 * ate.se);
}

TEST(GenerateBootstrapTest, DegenerateMeansAreClamped) {
  const ParametricSample src = GenerateParametric(DefaultSyntheticSpec(500, 2, 4));
  const UpliftDataset boot = GenerateBootstrap(src.dataset, TableModel(0, 0), 1);
  for (double y : boot.outcome()) EXPECT_EQ(y, 0.0);
}

TEST(GenerateBootstrapTest, OutOfRangeMeansRaise) {
  const ParametricSample src = GenerateParametric(DefaultSyntheticSpec(20, 2, 4));
  EXPECT_THROW(GenerateBootstrap(src.dataset, TableModel(0.1, 1.5), 1),
               NumericError);
}

}  // namespace
}  // namespace smite
