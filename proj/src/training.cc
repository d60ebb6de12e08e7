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

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>

#include "smite/errors.h"

namespace smite {
namespace {

Vector Gather(std::span<const double> v, std::span<const std::size_t> idx) {
  Vector out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

void SgdStep(double rate, const Parameters& gradient, Parameters* params) {
  for (std::size_t l = 0; l < params->layers.size(); ++l) {
    auto w = params->layers[l].weights.values();
    const auto gw = gradient.layers[l].weights.values();
    for (std::size_t k = 0; k < w.size(); ++k) w[k] -= rate * gw[k];
    auto& b = params->layers[l].bias;
    const auto& gb = gradient.layers[l].bias;
    for (std::size_t k = 0; k < b.size(); ++k) b[k] -= rate * gb[k];
  }
}

std::string RateString(double rate) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", rate);
  return buf;
}

}  // namespace

void TrainConfig::Validate() const {
  Objective().Validate();
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw UsageError("learning_rate must be finite and >= 0");
  }
  if (epochs < 1) throw UsageError("epochs must be >= 1");
  if (batch_size < 1) throw UsageError("batch_size must be >= 1");
  if (qini_grid < 1) throw UsageError("qini_grid must be >= 1");
  ArchitectureFor(1).Validate();
}

Architecture TrainConfig::ArchitectureFor(std::size_t num_features) const {
  Architecture arch;
  arch.input_dim = num_features + 1;
  arch.hidden_widths = hidden_widths;
  arch.linear_prefix = linear_prefix;
  arch.leaky_slope = leaky_slope;
  return arch;
}

TwinOutput TrainedModel::Predict(const Matrix& features,
                                 std::span<const double> treatment) const {
  return ForwardTwin(params, arch, standardizer.Apply(features), treatment);
}

ConditionalMeans TrainedModel::PredictConditionalMeans(
    const Matrix& features) const {
  TwinOutput out = Predict(features);
  return ConditionalMeans{std::move(out.mu0), std::move(out.mu1)};
}

TrainedModel Train(const TrainConfig& config, const UpliftDataset& train,
                   const UpliftDataset& valid) {
  config.Validate();
  train.RequireBothArms("training set");
  valid.RequireBothArms("validation set");
  if (train.num_features() != valid.num_features()) {
    throw ShapeError("training and validation sets have different covariates");
  }
  if (config.variant == LossVariant::kIndirect) {
    CheckIndirectPropensity(train.propensity());
  }

  TrainedModel model;
  model.config = config;
  model.arch = config.ArchitectureFor(train.num_features());
  model.arch.Validate();
  model.standardizer = Standardizer::Fit(train.features());
  model.params = InitParameters(model.arch, MixSeed(config.seed, 10));

  const Matrix x_train = model.standardizer.Apply(train.features());
  const Matrix x_valid = model.standardizer.Apply(valid.features());
  const Vector z_train = TransformOutcome(train);
  const CompositeSpec objective = config.Objective();

  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(MixSeed(config.seed, 11));

  Parameters current = model.params;
  bool have_best = false;
  for (std::size_t epoch = 1; epoch <= config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size();
         start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const std::span<const std::size_t> idx(order.data() + start, end - start);
      const Matrix xb = x_train.SelectRows(idx);
      const Vector tb = Gather(train.treatment(), idx);
      const Vector yb = Gather(train.outcome(), idx);
      const Vector zb = Gather(z_train, idx);
      BackwardResult step;
      try {
        step = Backward(current, model.arch, xb, tb, yb, zb, objective);
      } catch (const NumericError& e) {
        throw DivergedError("training diverged at epoch " +
                            std::to_string(epoch) + " with learning rate " +
                            RateString(config.learning_rate) + ": " + e.what());
      }
      loss_sum += step.loss * static_cast<double>(idx.size());
      SgdStep(config.learning_rate, step.gradient, &current);
    }
    bool finite = std::isfinite(loss_sum);
    for (const auto& layer : current.layers) {
      if (!finite) break;
      for (double w : layer.weights.values()) finite = finite && std::isfinite(w);
    }
    if (!finite) {
      throw DivergedError("training diverged at epoch " + std::to_string(epoch) +
                          " with learning rate " +
                          RateString(config.learning_rate));
    }

    double valid_qini;
    try {
      const TwinOutput out = ForwardTwin(current, model.arch, x_valid);
      valid_qini = QiniCoefficient(ComputeQiniCurve(
          out.uplift, valid.treatment(), valid.outcome(), config.qini_grid,
          config.qini_formula));
    } catch (const NumericError& e) {
      throw DivergedError("training diverged at epoch " +
                          std::to_string(epoch) + " with learning rate " +
                          RateString(config.learning_rate) + ": " + e.what());
    }
    model.epoch_valid_qini.push_back(valid_qini);
    if (!have_best || valid_qini > model.best_valid_qini) {
      have_best = true;
      model.best_valid_qini = valid_qini;
      model.best_epoch = epoch;
      model.params = current;
    }
  }
  return model;
}

}  // namespace smite
