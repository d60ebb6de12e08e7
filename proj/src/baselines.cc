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

#include "smite/baselines.h"

#include <cmath>

#include "smite/errors.h"
#include "smite/losses.h"

namespace smite {
namespace {

Matrix ColumnOf(std::span<const double> v) {
  return Matrix(v.size(), 1, Vector(v.begin(), v.end()));
}

}  // namespace

Vector LogisticModel::PredictProbability(const Matrix& design) const {
  if (design.cols() != coefficients.size()) {
    throw ShapeError("LogisticModel: design " + design.ShapeString() +
                     " for " + std::to_string(coefficients.size()) +
                     " coefficients");
  }
  const Matrix eta = MatMul(design, ColumnOf(coefficients));
  Vector p(design.rows());
  for (std::size_t i = 0; i < p.size(); ++i) {
    p[i] = Sigmoid(eta(i, 0) + intercept);
  }
  return p;
}

LogisticObjective EvaluateLogistic(const Matrix& design,
                                   std::span<const double> y,
                                   std::span<const double> packed, double l2) {
  const std::size_t n = design.rows();
  const std::size_t d = design.cols();
  if (packed.size() != d + 1 || y.size() != n) {
    throw ShapeError("EvaluateLogistic: design " + design.ShapeString() +
                     ", " + std::to_string(y.size()) + " labels, " +
                     std::to_string(packed.size()) + " parameters");
  }
  const double intercept = packed[d];
  const Matrix eta = MatMul(design, ColumnOf(packed.first(d)));
  Matrix residual(n, 1);
  double loss = 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double z = eta(i, 0) + intercept;
    // log(1 + e^z) - y z, evaluated without overflow.
    const double softplus =
        z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
    loss += softplus - y[i] * z;
    residual(i, 0) = (Sigmoid(z) - y[i]) * inv_n;
  }
  LogisticObjective out;
  out.value = loss * inv_n;
  const Matrix grad = MatMulTransposeA(design, residual);
  out.gradient.resize(d + 1);
  for (std::size_t j = 0; j < d; ++j) {
    out.value += 0.5 * l2 * packed[j] * packed[j];
    out.gradient[j] = grad(j, 0) + l2 * packed[j];
  }
  double intercept_grad = 0.0;
  for (std::size_t i = 0; i < n; ++i) intercept_grad += residual(i, 0);
  out.gradient[d] = intercept_grad;
  return out;
}

LogisticModel FitLogistic(const Matrix& design, std::span<const double> y,
                          const LogisticFitOptions& options) {
  const std::size_t d = design.cols();
  Vector packed(d + 1, 0.0);
  for (std::size_t it = 0; it < options.iterations; ++it) {
    const LogisticObjective obj = EvaluateLogistic(design, y, packed, options.l2);
    if (!std::isfinite(obj.value)) {
      throw NumericError("logistic fit diverged at iteration " +
                         std::to_string(it));
    }
    for (std::size_t j = 0; j <= d; ++j) {
      packed[j] -= options.learning_rate * obj.gradient[j];
    }
  }
  LogisticModel model;
  model.coefficients.assign(packed.begin(), packed.begin() + d);
  model.intercept = packed[d];
  return model;
}

ConditionalMeans TwoModelBaseline::PredictConditionalMeans(
    const Matrix& features) const {
  const Matrix x = standardizer.Apply(features);
  return ConditionalMeans{control.PredictProbability(x),
                          treated.PredictProbability(x)};
}

Matrix InteractionBaseline::Design(const Matrix& standardized,
                                   std::span<const double> t) {
  if (t.size() != standardized.rows()) {
    throw ShapeError("InteractionBaseline::Design: " +
                     std::to_string(t.size()) + " treatment flags for " +
                     standardized.ShapeString());
  }
  const std::size_t p = standardized.cols();
  Matrix out(standardized.rows(), 2 * p + 1);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    const auto x = standardized.Row(i);
    auto row = out.Row(i);
    for (std::size_t j = 0; j < p; ++j) {
      row[j] = x[j];
      row[p + 1 + j] = x[j] * t[i];
    }
    row[p] = t[i];
  }
  return out;
}

Matrix InteractionBaseline::Design(const Matrix& standardized, double t) {
  return Design(standardized, Vector(standardized.rows(), t));
}

ConditionalMeans InteractionBaseline::PredictConditionalMeans(
    const Matrix& features) const {
  const Matrix x = standardizer.Apply(features);
  return ConditionalMeans{model.PredictProbability(Design(x, 0.0)),
                          model.PredictProbability(Design(x, 1.0))};
}

TwoModelBaseline FitTwoModel(const UpliftDataset& ds,
                             const LogisticFitOptions& options) {
  ds.RequireBothArms("two-model training set");
  TwoModelBaseline out;
  out.standardizer = Standardizer::Fit(ds.features());
  const Matrix x = out.standardizer.Apply(ds.features());
  std::vector<std::size_t> treated;
  std::vector<std::size_t> control;
  for (std::size_t i = 0; i < ds.size(); ++i) {
    (ds.treatment()[i] == 1.0 ? treated : control).push_back(i);
  }
  auto fit_arm = [&](const std::vector<std::size_t>& rows) {
    Vector y(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) y[i] = ds.outcome()[rows[i]];
    return FitLogistic(x.SelectRows(rows), y, options);
  };
  out.treated = fit_arm(treated);
  out.control = fit_arm(control);
  return out;
}

InteractionBaseline FitInteraction(const UpliftDataset& ds,
                                   const LogisticFitOptions& options) {
  ds.RequireBothArms("interaction training set");
  InteractionBaseline out;
  out.standardizer = Standardizer::Fit(ds.features());
  const Matrix x = out.standardizer.Apply(ds.features());
  out.model = FitLogistic(InteractionBaseline::Design(x, ds.treatment()),
                          ds.outcome(), options);
  return out;
}

}  // namespace smite
