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

// Loss heads of the twin network. All three losses are per-row means so the
// trade-off weight alpha keeps the same meaning for any batch size:
//
//   L  = -mean[ y log muT + (1 - y) log(1 - muT) ]         conditional means
//   J  =  mean[ (z - (mu1 - mu0))^2 ]                      transformed outcome
//   I  = -mean[ t log Pi_y + (1 - t) log(1 - Pi_y) ]       treatment proportion
//
// with Pi_1 = mu1 / (mu0 + mu1), Pi_0 = (1 - mu1) / ((1 - mu0) + (1 - mu1)),
// Pi_y = y Pi_1 + (1 - y) Pi_0. The composite objective is
// (1 - alpha) * U + alpha * L where U is J (TO) or I (IE).

#ifndef SMITE_LOSSES_H_
#define SMITE_LOSSES_H_

#include <span>
#include <string>
#include <string_view>

#include "smite/numerics.h"

namespace smite {

// Probabilities are clamped to [kProbabilityClamp, 1 - kProbabilityClamp]
// before any log or ratio.
inline constexpr double kProbabilityClamp = 1e-7;

// Largest deviation from 1/2 accepted by the indirect loss.
inline constexpr double kIndirectPropensityTolerance = 0.02;

enum class LossVariant {
  kTransformedOutcome,    // "TO": squared error against Z
  kIndirect,              // "IE": cross-entropy of Pi against T
  kAbsoluteTransformed,   // "L1": absolute error against Z
};

std::string VariantName(LossVariant variant);
// Accepts TO, IE and L1 (case-insensitive). Throws UsageError otherwise.
LossVariant ParseVariant(std::string_view name);

struct CompositeSpec {
  LossVariant variant = LossVariant::kIndirect;
  double alpha = 0.5;

  void Validate() const;
};

double BceLoss(std::span<const double> mu_t, std::span<const double> y);

double DirectUpliftLoss(std::span<const double> mu1, std::span<const double> mu0,
                        std::span<const double> z);

double AbsoluteUpliftLoss(std::span<const double> mu1,
                          std::span<const double> mu0,
                          std::span<const double> z);

struct TreatmentProportions {
  Vector pi1;  // treated share among positive responders
  Vector pi0;  // treated share among negative responders
};

TreatmentProportions PiTransform(std::span<const double> mu1,
                                 std::span<const double> mu0);

double IndirectUpliftLoss(std::span<const double> pi1,
                          std::span<const double> pi0,
                          std::span<const double> t, std::span<const double> y);

// Throws UnsupportedPropensityError unless |e - 1/2| <= tolerance.
void CheckIndirectPropensity(double propensity);

// Twin outputs plus the labels of one batch. `z` may be empty for IE.
struct LossBatch {
  std::span<const double> mu1;
  std::span<const double> mu0;
  std::span<const double> t;
  std::span<const double> y;
  std::span<const double> z;
};

double CompositeLoss(const CompositeSpec& spec, const LossBatch& batch);

struct LossGradient {
  double value = 0.0;
  Vector d_mu1;
  Vector d_mu0;
};

// Value and partial derivatives with respect to mu1 and mu0.
LossGradient CompositeLossGradient(const CompositeSpec& spec,
                                   const LossBatch& batch);

}  // namespace smite

#endif  // SMITE_LOSSES_H_
