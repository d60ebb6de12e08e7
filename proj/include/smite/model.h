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

// The twin network: a single MLP evaluated twice per example, once with the
// treatment input pinned to 1 (mu1) and once pinned to 0 (mu0). Both passes
// read the same Parameters, so every gradient step moves the shared weights
// through both branches.

#ifndef SMITE_MODEL_H_
#define SMITE_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "smite/losses.h"
#include "smite/numerics.h"

namespace smite {

struct Architecture {
  // Covariates plus the treatment slot (p + 1).
  std::size_t input_dim = 0;
  std::vector<std::size_t> hidden_widths = {200, 200, 300, 100, 50, 10};
  // Leading hidden layers with the identity activation; the remaining hidden
  // layers use leaky ReLU. The head is a single affine unit with a sigmoid.
  std::size_t linear_prefix = 2;
  double leaky_slope = 0.01;

  static Architecture ForFeatures(std::size_t num_features);

  std::size_t num_layers() const { return hidden_widths.size() + 1; }
  // Throws UsageError.
  void Validate() const;
  std::string ToString() const;

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

// weights: fan_in x fan_out, so a layer maps rows as h * W + b.
struct DenseLayer {
  Matrix weights;
  Vector bias;

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

struct Parameters {
  std::vector<DenseLayer> layers;

  static Parameters Zeros(const Architecture& arch);

  std::size_t NumValues() const;
  // Layer by layer: weights row-major, then bias.
  Vector Flatten() const;
  // Inverse of Flatten; throws ShapeError on a length mismatch.
  void Unflatten(std::span<const double> values);
  // Throws ShapeError when the layer shapes do not chain as in `arch`.
  void CheckShapes(const Architecture& arch) const;

  friend bool operator==(const Parameters&, const Parameters&) = default;
};

// Weights iid uniform on [-sqrt(6 / fan_in), sqrt(6 / fan_in)], biases zero.
Parameters InitParameters(const Architecture& arch, std::uint64_t seed);

struct TwinOutput {
  Vector mu1;
  Vector mu0;
  Vector mu_t;  // empty when no treatment vector was given
  Vector uplift;
};

// `features` has input_dim - 1 columns (already standardized). `treatment` is
// either empty or one 0/1 flag per row. Probabilities are clamped to
// [kProbabilityClamp, 1 - kProbabilityClamp].
TwinOutput ForwardTwin(const Parameters& params, const Architecture& arch,
                       const Matrix& features,
                       std::span<const double> treatment = {});

struct BackwardResult {
  double loss = 0.0;
  Parameters gradient;
};

// Composite loss of one batch and its exact gradient with respect to every
// weight and bias. `z` is the transformed outcome (unused by IE).
BackwardResult Backward(const Parameters& params, const Architecture& arch,
                        const Matrix& features, std::span<const double> t,
                        std::span<const double> y, std::span<const double> z,
                        const CompositeSpec& objective);

}  // namespace smite

#endif  // SMITE_MODEL_H_
