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

#include "smite/model.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "smite/errors.h"

namespace smite {
namespace {

enum class Activation { kIdentity, kLeakyRelu, kSigmoid };

Activation LayerActivation(const Architecture& arch, std::size_t layer) {
  if (layer + 1 == arch.num_layers()) return Activation::kSigmoid;
  return layer < arch.linear_prefix ? Activation::kIdentity
                                    : Activation::kLeakyRelu;
}

std::size_t FanOut(const Architecture& arch, std::size_t layer) {
  return layer < arch.hidden_widths.size() ? arch.hidden_widths[layer] : 1;
}

std::size_t FanIn(const Architecture& arch, std::size_t layer) {
  return layer == 0 ? arch.input_dim : arch.hidden_widths[layer - 1];
}

// Rows [0, n) carry treatment 1, rows [n, 2n) treatment 0; the treatment slot
// is the last input column.
Matrix StackTwinInputs(const Matrix& features) {
  const std::size_t n = features.rows();
  const std::size_t p = features.cols();
  Matrix stacked(2 * n, p + 1);
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = features.Row(i);
    auto top = stacked.Row(i);
    auto bottom = stacked.Row(n + i);
    std::copy(src.begin(), src.end(), top.begin());
    std::copy(src.begin(), src.end(), bottom.begin());
    top[p] = 1.0;
    bottom[p] = 0.0;
  }
  return stacked;
}

std::string LayerName(std::size_t layer) {
  return "layer " + std::to_string(layer);
}

// Forward activations kept for the backward pass. pre[l] is the affine output
// of layer l, post[l] its activation; post[0] is the stacked input.
struct ForwardCache {
  std::vector<Matrix> pre;
  std::vector<Matrix> post;
};

ForwardCache RunForward(const Parameters& params, const Architecture& arch,
                        const Matrix& features) {
  if (features.cols() + 1 != arch.input_dim) {
    throw ShapeError("ForwardTwin: features " + features.ShapeString() +
                     " do not match input_dim " +
                     std::to_string(arch.input_dim) +
                     " (covariates + treatment slot)");
  }
  params.CheckShapes(arch);
  ForwardCache cache;
  cache.post.push_back(StackTwinInputs(features));
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    const DenseLayer& layer = params.layers[l];
    Matrix a;
    try {
      a = MatMul(cache.post.back(), layer.weights);
    } catch (const NumericError& e) {
      throw NumericError(LayerName(l) + " forward: " + e.what());
    }
    for (std::size_t r = 0; r < a.rows(); ++r) {
      auto row = a.Row(r);
      for (std::size_t c = 0; c < row.size(); ++c) row[c] += layer.bias[c];
    }
    Matrix h = a;
    switch (LayerActivation(arch, l)) {
      case Activation::kIdentity:
        break;
      case Activation::kLeakyRelu:
        for (double& v : h.values()) v = LeakyRelu(v, arch.leaky_slope);
        break;
      case Activation::kSigmoid:
        for (double& v : h.values()) v = Sigmoid(v);
        break;
    }
    CheckFinite(h.values(), LayerName(l) + " forward");
    cache.pre.push_back(std::move(a));
    cache.post.push_back(std::move(h));
  }
  return cache;
}

}  // namespace

Architecture Architecture::ForFeatures(std::size_t num_features) {
  Architecture arch;
  arch.input_dim = num_features + 1;
  return arch;
}

void Architecture::Validate() const {
  if (input_dim < 2) {
    throw UsageError("architecture needs at least one covariate input");
  }
  if (hidden_widths.empty()) throw UsageError("hidden_widths must be nonempty");
  for (std::size_t w : hidden_widths) {
    if (w == 0) throw UsageError("hidden widths must be positive");
  }
  if (linear_prefix > hidden_widths.size()) {
    throw UsageError("linear_prefix exceeds the number of hidden layers");
  }
  if (!(leaky_slope >= 0.0) || !std::isfinite(leaky_slope)) {
    throw UsageError("leaky_slope must be finite and non-negative");
  }
}

std::string Architecture::ToString() const {
  std::ostringstream out;
  out << "input_dim=" << input_dim << " hidden=";
  for (std::size_t i = 0; i < hidden_widths.size(); ++i) {
    out << (i ? "," : "") << hidden_widths[i];
  }
  out << " linear_prefix=" << linear_prefix << " leaky_slope=" << leaky_slope;
  return out.str();
}

Parameters Parameters::Zeros(const Architecture& arch) {
  arch.Validate();
  Parameters p;
  for (std::size_t l = 0; l < arch.num_layers(); ++l) {
    p.layers.push_back(DenseLayer{Matrix(FanIn(arch, l), FanOut(arch, l)),
                                  Vector(FanOut(arch, l), 0.0)});
  }
  return p;
}

std::size_t Parameters::NumValues() const {
  std::size_t n = 0;
  for (const auto& layer : layers) n += layer.weights.size() + layer.bias.size();
  return n;
}

Vector Parameters::Flatten() const {
  Vector out;
  out.reserve(NumValues());
  for (const auto& layer : layers) {
    out.insert(out.end(), layer.weights.values().begin(),
               layer.weights.values().end());
    out.insert(out.end(), layer.bias.begin(), layer.bias.end());
  }
  return out;
}

void Parameters::Unflatten(std::span<const double> values) {
  if (values.size() != NumValues()) {
    throw ShapeError("Parameters::Unflatten: " + std::to_string(values.size()) +
                     " values for " + std::to_string(NumValues()) +
                     " parameters");
  }
  std::size_t k = 0;
  for (auto& layer : layers) {
    for (double& w : layer.weights.values()) w = values[k++];
    for (double& b : layer.bias) b = values[k++];
  }
}

void Parameters::CheckShapes(const Architecture& arch) const {
  if (layers.size() != arch.num_layers()) {
    throw ShapeError("parameters have " + std::to_string(layers.size()) +
                     " layers, architecture expects " +
                     std::to_string(arch.num_layers()));
  }
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.weights.rows() != FanIn(arch, l) ||
        layer.weights.cols() != FanOut(arch, l) ||
        layer.bias.size() != FanOut(arch, l)) {
      throw ShapeError(LayerName(l) + ": weights " +
                       layer.weights.ShapeString() + " and bias " +
                       std::to_string(layer.bias.size()) + ", expected " +
                       std::to_string(FanIn(arch, l)) + "x" +
                       std::to_string(FanOut(arch, l)));
    }
  }
}

Parameters InitParameters(const Architecture& arch, std::uint64_t seed) {
  Parameters p = Parameters::Zeros(arch);
  std::mt19937_64 rng(seed);
  for (auto& layer : p.layers) {
    const double bound =
        std::sqrt(6.0 / static_cast<double>(layer.weights.rows()));
    std::uniform_real_distribution<double> unif(-bound, bound);
    for (double& w : layer.weights.values()) w = unif(rng);
  }
  return p;
}

TwinOutput ForwardTwin(const Parameters& params, const Architecture& arch,
                       const Matrix& features,
                       std::span<const double> treatment) {
  const std::size_t n = features.rows();
  if (!treatment.empty() && treatment.size() != n) {
    throw ShapeError("ForwardTwin: " + std::to_string(treatment.size()) +
                     " treatment flags for " + std::to_string(n) + " rows");
  }
  const ForwardCache cache = RunForward(params, arch, features);
  const auto out = cache.post.back().values();
  TwinOutput twin;
  twin.mu1.resize(n);
  twin.mu0.resize(n);
  twin.uplift.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    twin.mu1[i] = std::clamp(out[i], kProbabilityClamp, 1 - kProbabilityClamp);
    twin.mu0[i] =
        std::clamp(out[n + i], kProbabilityClamp, 1 - kProbabilityClamp);
    twin.uplift[i] = twin.mu1[i] - twin.mu0[i];
  }
  if (!treatment.empty()) {
    twin.mu_t.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      twin.mu_t[i] = treatment[i] == 1.0 ? twin.mu1[i] : twin.mu0[i];
    }
  }
  return twin;
}

BackwardResult Backward(const Parameters& params, const Architecture& arch,
                        const Matrix& features, std::span<const double> t,
                        std::span<const double> y, std::span<const double> z,
                        const CompositeSpec& objective) {
  objective.Validate();
  const std::size_t n = features.rows();
  if (t.size() != n || y.size() != n) {
    throw ShapeError("Backward: label lengths do not match " +
                     std::to_string(n) + " rows");
  }
  ForwardCache cache = RunForward(params, arch, features);
  const auto raw = cache.post.back().values();

  Vector mu1(n);
  Vector mu0(n);
  for (std::size_t i = 0; i < n; ++i) {
    mu1[i] = std::clamp(raw[i], kProbabilityClamp, 1 - kProbabilityClamp);
    mu0[i] = std::clamp(raw[n + i], kProbabilityClamp, 1 - kProbabilityClamp);
  }
  const LossGradient lg =
      CompositeLossGradient(objective, LossBatch{mu1, mu0, t, y, z});
  if (!std::isfinite(lg.value)) throw NumericError("Backward: non-finite loss");

  // Through the clamp (zero outside the interior) and the sigmoid head.
  const std::size_t last = params.layers.size() - 1;
  Matrix delta(2 * n, 1);
  for (std::size_t r = 0; r < 2 * n; ++r) {
    const double s = raw[r];
    const bool interior = s >= kProbabilityClamp && s <= 1 - kProbabilityClamp;
    const double d_mu = r < n ? lg.d_mu1[r] : lg.d_mu0[r - n];
    delta(r, 0) = interior ? d_mu * s * (1.0 - s) : 0.0;
  }

  BackwardResult result;
  result.loss = lg.value;
  result.gradient.layers.resize(params.layers.size());
  for (std::size_t l = last + 1; l-- > 0;) {
    DenseLayer& g = result.gradient.layers[l];
    try {
      g.weights = MatMulTransposeA(cache.post[l], delta);
    } catch (const NumericError& e) {
      throw NumericError(LayerName(l) + " backward: " + e.what());
    }
    g.bias.assign(delta.cols(), 0.0);
    for (std::size_t r = 0; r < delta.rows(); ++r) {
      const auto row = delta.Row(r);
      for (std::size_t c = 0; c < row.size(); ++c) g.bias[c] += row[c];
    }
    if (l == 0) break;
    Matrix upstream = MatMulTransposeB(delta, params.layers[l].weights);
    if (LayerActivation(arch, l - 1) == Activation::kLeakyRelu) {
      const auto pre = cache.pre[l - 1].values();
      auto u = upstream.values();
      for (std::size_t k = 0; k < u.size(); ++k) {
        u[k] *= LeakyReluDerivative(pre[k], arch.leaky_slope);
      }
    }
    CheckFinite(upstream.values(), LayerName(l - 1) + " backward");
    delta = std::move(upstream);
  }
  return result;
}

}  // namespace smite
