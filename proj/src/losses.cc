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

#include "smite/losses.h"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "smite/errors.h"

namespace smite {
namespace {

double ClampProbability(double p) {
  return std::clamp(p, kProbabilityClamp, 1.0 - kProbabilityClamp);
}

// Zero derivative where the clamp is active.
bool Interior(double p) {
  return p >= kProbabilityClamp && p <= 1.0 - kProbabilityClamp;
}

void CheckLengths(std::size_t n, std::span<const double> v, const char* what,
                  const char* loss) {
  if (v.size() != n) {
    throw ShapeError(std::string(loss) + ": " + what + " has length " +
                     std::to_string(v.size()) + ", expected " +
                     std::to_string(n));
  }
}

double Sign(double v) { return (v > 0) - (v < 0); }

// Adds the gradient of L (scaled by `w`) and returns its value.
double AccumulateBce(const LossBatch& b, double w, LossGradient* g) {
  const std::size_t n = b.mu1.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double raw = b.t[i] * b.mu1[i] + (1.0 - b.t[i]) * b.mu0[i];
    const double m = ClampProbability(raw);
    sum -= b.y[i] * std::log(m) + (1.0 - b.y[i]) * std::log(1.0 - m);
    if (g != nullptr && Interior(raw)) {
      const double d = -w * inv_n * (b.y[i] / m - (1.0 - b.y[i]) / (1.0 - m));
      g->d_mu1[i] += b.t[i] * d;
      g->d_mu0[i] += (1.0 - b.t[i]) * d;
    }
  }
  return sum * inv_n;
}

double AccumulateDirect(const LossBatch& b, double w, bool absolute,
                        LossGradient* g) {
  const std::size_t n = b.mu1.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = b.z[i] - (b.mu1[i] - b.mu0[i]);
    sum += absolute ? std::abs(r) : r * r;
    if (g != nullptr) {
      // d/d(mu1) of r^2 is -2r, of |r| is -sign(r).
      const double d = -w * inv_n * (absolute ? Sign(r) : 2.0 * r);
      g->d_mu1[i] += d;
      g->d_mu0[i] -= d;
    }
  }
  return sum * inv_n;
}

double AccumulateIndirect(const LossBatch& b, double w, LossGradient* g) {
  const std::size_t n = b.mu1.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m1 = ClampProbability(b.mu1[i]);
    const double m0 = ClampProbability(b.mu0[i]);
    const double pos = m0 + m1;
    const double neg = (1.0 - m0) + (1.0 - m1);
    const double pi1 = m1 / pos;
    const double pi0 = (1.0 - m1) / neg;
    const double y = b.y[i];
    const double t = b.t[i];
    const double pi_y = y * pi1 + (1.0 - y) * pi0;
    sum -= t * std::log(pi_y) + (1.0 - t) * std::log(1.0 - pi_y);
    if (g != nullptr) {
      const double d_pi = -w * inv_n * (t / pi_y - (1.0 - t) / (1.0 - pi_y));
      // Partials of Pi_1 and Pi_0 with respect to mu1 and mu0.
      const double pi1_d1 = m0 / (pos * pos);
      const double pi1_d0 = -m1 / (pos * pos);
      const double pi0_d1 = -(1.0 - m0) / (neg * neg);
      const double pi0_d0 = (1.0 - m1) / (neg * neg);
      if (Interior(b.mu1[i])) {
        g->d_mu1[i] += d_pi * (y * pi1_d1 + (1.0 - y) * pi0_d1);
      }
      if (Interior(b.mu0[i])) {
        g->d_mu0[i] += d_pi * (y * pi1_d0 + (1.0 - y) * pi0_d0);
      }
    }
  }
  return sum * inv_n;
}

double Evaluate(const CompositeSpec& spec, const LossBatch& batch,
                LossGradient* g) {
  spec.Validate();
  const std::size_t n = batch.mu1.size();
  if (n == 0) throw ShapeError("CompositeLoss: empty batch");
  CheckLengths(n, batch.mu0, "mu0", "CompositeLoss");
  CheckLengths(n, batch.t, "t", "CompositeLoss");
  CheckLengths(n, batch.y, "y", "CompositeLoss");
  if (spec.variant != LossVariant::kIndirect) {
    CheckLengths(n, batch.z, "z", "CompositeLoss");
  }
  const double a = spec.alpha;
  double uplift_term = 0.0;
  switch (spec.variant) {
    case LossVariant::kTransformedOutcome:
      uplift_term = AccumulateDirect(batch, 1.0 - a, /*absolute=*/false, g);
      break;
    case LossVariant::kAbsoluteTransformed:
      uplift_term = AccumulateDirect(batch, 1.0 - a, /*absolute=*/true, g);
      break;
    case LossVariant::kIndirect:
      uplift_term = AccumulateIndirect(batch, 1.0 - a, g);
      break;
  }
  const double bce = AccumulateBce(batch, a, g);
  // Exact endpoints: alpha = 1 returns L, alpha = 0 returns U.
  if (a == 1.0) return bce;
  if (a == 0.0) return uplift_term;
  return (1.0 - a) * uplift_term + a * bce;
}

}  // namespace

std::string VariantName(LossVariant variant) {
  switch (variant) {
    case LossVariant::kTransformedOutcome:
      return "TO";
    case LossVariant::kIndirect:
      return "IE";
    case LossVariant::kAbsoluteTransformed:
      return "L1";
  }
  return "?";
}

LossVariant ParseVariant(std::string_view name) {
  std::string upper(name);
  for (char& c : upper) c = static_cast<char>(std::toupper(c));
  if (upper == "TO") return LossVariant::kTransformedOutcome;
  if (upper == "IE") return LossVariant::kIndirect;
  if (upper == "L1") return LossVariant::kAbsoluteTransformed;
  throw UsageError("unknown loss variant '" + std::string(name) +
                   "' (expected TO, IE or L1)");
}

void CompositeSpec::Validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw UsageError("alpha must be in [0, 1], got " + std::to_string(alpha));
  }
}

double BceLoss(std::span<const double> mu_t, std::span<const double> y) {
  const std::size_t n = mu_t.size();
  CheckLengths(n, y, "y", "BceLoss");
  if (n == 0) throw ShapeError("BceLoss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double m = ClampProbability(mu_t[i]);
    sum -= y[i] * std::log(m) + (1.0 - y[i]) * std::log(1.0 - m);
  }
  return sum / static_cast<double>(n);
}

double DirectUpliftLoss(std::span<const double> mu1, std::span<const double> mu0,
                        std::span<const double> z) {
  const std::size_t n = mu1.size();
  CheckLengths(n, mu0, "mu0", "DirectUpliftLoss");
  CheckLengths(n, z, "z", "DirectUpliftLoss");
  if (n == 0) throw ShapeError("DirectUpliftLoss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = z[i] - (mu1[i] - mu0[i]);
    sum += r * r;
  }
  return sum / static_cast<double>(n);
}

double AbsoluteUpliftLoss(std::span<const double> mu1,
                          std::span<const double> mu0,
                          std::span<const double> z) {
  const std::size_t n = mu1.size();
  CheckLengths(n, mu0, "mu0", "AbsoluteUpliftLoss");
  CheckLengths(n, z, "z", "AbsoluteUpliftLoss");
  if (n == 0) throw ShapeError("AbsoluteUpliftLoss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += std::abs(z[i] - (mu1[i] - mu0[i]));
  return sum / static_cast<double>(n);
}

TreatmentProportions PiTransform(std::span<const double> mu1,
                                 std::span<const double> mu0) {
  CheckLengths(mu1.size(), mu0, "mu0", "PiTransform");
  TreatmentProportions out{Vector(mu1.size()), Vector(mu1.size())};
  for (std::size_t i = 0; i < mu1.size(); ++i) {
    const double m1 = ClampProbability(mu1[i]);
    const double m0 = ClampProbability(mu0[i]);
    out.pi1[i] = m1 / (m0 + m1);
    out.pi0[i] = (1.0 - m1) / ((1.0 - m0) + (1.0 - m1));
  }
  return out;
}

double IndirectUpliftLoss(std::span<const double> pi1,
                          std::span<const double> pi0,
                          std::span<const double> t, std::span<const double> y) {
  const std::size_t n = pi1.size();
  CheckLengths(n, pi0, "pi0", "IndirectUpliftLoss");
  CheckLengths(n, t, "t", "IndirectUpliftLoss");
  CheckLengths(n, y, "y", "IndirectUpliftLoss");
  if (n == 0) throw ShapeError("IndirectUpliftLoss: empty input");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double pi_y = ClampProbability(y[i] * pi1[i] + (1.0 - y[i]) * pi0[i]);
    sum -= t[i] * std::log(pi_y) + (1.0 - t[i]) * std::log(1.0 - pi_y);
  }
  return sum / static_cast<double>(n);
}

void CheckIndirectPropensity(double propensity) {
  if (std::abs(propensity - 0.5) > kIndirectPropensityTolerance) {
    throw UnsupportedPropensityError(
        "the indirect (IE) loss requires a propensity of 1/2, dataset has " +
        std::to_string(propensity) +
        "; balance the arms first (BalanceArms / balance_arms=true)");
  }
}

double CompositeLoss(const CompositeSpec& spec, const LossBatch& batch) {
  return Evaluate(spec, batch, nullptr);
}

LossGradient CompositeLossGradient(const CompositeSpec& spec,
                                   const LossBatch& batch) {
  LossGradient g;
  g.d_mu1.assign(batch.mu1.size(), 0.0);
  g.d_mu0.assign(batch.mu1.size(), 0.0);
  g.value = Evaluate(spec, batch, &g);
  return g;
}

}  // namespace smite
