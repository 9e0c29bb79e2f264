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

#ifndef FEDSEL_PRIVACY_H_
#define FEDSEL_PRIVACY_H_

#include <cstdint>

#include "fedsel/model.h"
#include "fedsel/rng.h"

namespace fedsel {

// Per-round Gaussian mechanism parameters for one client update. delta is not
// a knob of the protocol itself; the calibration formula needs it.
struct PrivacyParams {
  bool enabled = false;
  double epsilon_round = 10.0;
  double delta = 1e-5;
  double clip_norm = 1.0;
  double sigma = 0.0;  // derived; always 0 when disabled

  bool operator==(const PrivacyParams&) const = default;
};

// Running totals under basic (linear) composition.
struct BudgetLedger {
  std::uint64_t rounds_completed = 0;
  double epsilon_total = 0.0;
  double delta_total = 0.0;

  bool operator==(const BudgetLedger&) const = default;
};

// Builds params with sigma filled in. Throws ParameterError on out-of-range
// inputs when `enabled`.
PrivacyParams MakePrivacyParams(bool enabled, double epsilon_round,
                                double delta, double clip_norm);

double L2Norm(const GradientVector& v);

// Scales `grad` by min(1, clip_norm / ||grad||).
GradientVector Clip(const GradientVector& grad, double clip_norm);

// clip_norm * sqrt(2 ln(1.25 / delta)) / epsilon.
double CalibrateSigma(double epsilon, double delta, double clip_norm);

// Adds independent N(0, sigma^2) noise to every coordinate.
GradientVector AddNoise(const GradientVector& grad, double sigma,
                        RngStream& rng);

BudgetLedger RecordRound(const BudgetLedger& ledger,
                         const PrivacyParams& params);

}  // namespace fedsel

#endif  // FEDSEL_PRIVACY_H_
