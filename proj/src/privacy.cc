//
// Copyright 2026 The fedsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "fedsel/privacy.h"

#include <cmath>
#include <random>

#include "fedsel/error.h"

namespace fedsel {

PrivacyParams MakePrivacyParams(bool enabled, double epsilon_round,
                                double delta, double clip_norm) {
  PrivacyParams p;
  p.enabled = enabled;
  p.epsilon_round = epsilon_round;
  p.delta = delta;
  p.clip_norm = clip_norm;
  p.sigma = enabled ? CalibrateSigma(epsilon_round, delta, clip_norm) : 0.0;
  return p;
}

double L2Norm(const GradientVector& v) {
  double sum = 0.0;
  for (double x : v.values) sum += x * x;
  return std::sqrt(sum);
}

GradientVector Clip(const GradientVector& grad, double clip_norm) {
  if (!(clip_norm > 0.0)) throw ParameterError("clip_norm must be positive");
  const double norm = L2Norm(grad);
  if (norm <= clip_norm) return grad;
  const double scale = clip_norm / norm;
  GradientVector out = grad;
  for (double& x : out.values) x *= scale;
  // Rounding in the rescale can leave the norm a few ulps above the bound.
  for (double clipped = L2Norm(out); clipped > clip_norm;
       clipped = L2Norm(out)) {
    const double shrink = std::nextafter(clip_norm / clipped, 0.0);
    for (double& x : out.values) x *= shrink;
  }
  return out;
}

double CalibrateSigma(double epsilon, double delta, double clip_norm) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw ParameterError("epsilon must be positive");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ParameterError("delta must lie in (0, 1)");
  }
  if (!(clip_norm > 0.0) || !std::isfinite(clip_norm)) {
    throw ParameterError("clip_norm must be positive");
  }
  return clip_norm * std::sqrt(2.0 * std::log(1.25 / delta)) / epsilon;
}

GradientVector AddNoise(const GradientVector& grad, double sigma,
                        RngStream& rng) {
  if (!(sigma >= 0.0)) throw ParameterError("sigma must be non-negative");
  if (sigma == 0.0) return grad;
  GradientVector out = grad;
  std::normal_distribution<double> noise(0.0, sigma);
  for (double& x : out.values) x += noise(rng);
  return out;
}

BudgetLedger RecordRound(const BudgetLedger& ledger,
                         const PrivacyParams& params) {
  if (!params.enabled) return ledger;
  BudgetLedger out = ledger;
  ++out.rounds_completed;
  // Recomputed from the count so totals stay exactly linear.
  const double rounds = static_cast<double>(out.rounds_completed);
  out.epsilon_total = rounds * params.epsilon_round;
  out.delta_total = rounds * params.delta;
  return out;
}

}  // namespace fedsel
