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

#include <gtest/gtest.h>

#include <cmath>

#include "fedsel/error.h"

namespace fedsel {
namespace {

TEST(ClipTest, RescalesLongVector) {
  const auto out = Clip(GradientVector{{3.0, 4.0}}, 1.0);
  EXPECT_NEAR(out.values[0], 0.6, 1e-15);
  EXPECT_NEAR(out.values[1], 0.8, 1e-15);
}

TEST(ClipTest, ShortVectorUnchanged) {
  const GradientVector v{{0.3, 0.4}};
  EXPECT_EQ(Clip(v, 1.0), v);
  EXPECT_EQ(Clip(GradientVector{{0.0, 0.0}}, 1.0), (GradientVector{{0.0, 0.0}}));
}

TEST(ClipTest, NormNeverExceedsBound) {
  RngStream rng(1, StreamPurpose::kNoise);
  std::normal_distribution<double> n(0.0, 50.0);
  for (int trial = 0; trial < 500; ++trial) {
    GradientVector v;
    for (int i = 0; i < 1 + trial % 40; ++i) v.values.push_back(n(rng));
    const double c = 0.01 + (trial % 7) * 0.3;
    EXPECT_LE(L2Norm(Clip(v, c)), c);
  }
}

TEST(CalibrateSigmaTest, KnownValue) {
  const double expected = std::sqrt(2.0 * std::log(1.25 / 1e-5));
  EXPECT_NEAR(CalibrateSigma(1.0, 1e-5, 1.0), expected, 1e-12);
  EXPECT_NEAR(CalibrateSigma(1.0, 1e-5, 1.0), 4.8448, 1e-4);
  EXPECT_NEAR(CalibrateSigma(10.0, 1e-5, 2.0), 2.0 * expected / 10.0, 1e-12);
}

TEST(CalibrateSigmaTest, RejectsInvalidInputs) {
  EXPECT_THROW(CalibrateSigma(0.0, 1e-5, 1.0), ParameterError);
  EXPECT_THROW(CalibrateSigma(-1.0, 1e-5, 1.0), ParameterError);
  EXPECT_THROW(CalibrateSigma(1.0, 0.0, 1.0), ParameterError);
  EXPECT_THROW(CalibrateSigma(1.0, 1.0, 1.0), ParameterError);
  EXPECT_THROW(CalibrateSigma(1.0, 1e-5, 0.0), ParameterError);
  EXPECT_THROW(MakePrivacyParams(true, -1.0, 1e-5, 1.0), ParameterError);
  EXPECT_NO_THROW(MakePrivacyParams(false, -1.0, 1e-5, 1.0));
}

TEST(AddNoiseTest, ZeroSigmaIsIdentity) {
  RngStream rng(0, StreamPurpose::kNoise);
  const GradientVector v{{1.0, -2.0, 3.5}};
  EXPECT_EQ(AddNoise(v, 0.0, rng), v);
}

TEST(AddNoiseTest, SampleMoments) {
  RngStream rng(42, StreamPurpose::kNoise);
  const std::size_t n = 100000;
  const double sigma = 2.0;
  const auto noisy = AddNoise(GradientVector{std::vector<double>(n, 0.0)}, sigma,
                              rng);
  double mean = 0.0, var = 0.0;
  for (double v : noisy.values) mean += v;
  mean /= n;
  for (double v : noisy.values) var += (v - mean) * (v - mean);
  var /= n - 1;
  EXPECT_NEAR(mean, 0.0, 4.0 * sigma / std::sqrt(static_cast<double>(n)));
  EXPECT_NEAR(std::sqrt(var), sigma, 0.02 * sigma);
}

TEST(AddNoiseTest, DeterministicPerStream) {
  RngStream a(5, StreamPurpose::kNoise, 3, 2), b(5, StreamPurpose::kNoise, 3, 2);
  const GradientVector v{{0.0, 0.0}};
  EXPECT_EQ(AddNoise(v, 1.0, a), AddNoise(v, 1.0, b));
}

TEST(BudgetLedgerTest, LinearComposition) {
  const auto params = MakePrivacyParams(true, 1.0, 1e-5, 1.0);
  BudgetLedger ledger;
  for (int t = 0; t < 10; ++t) ledger = RecordRound(ledger, params);
  EXPECT_EQ(ledger.rounds_completed, 10u);
  EXPECT_NEAR(ledger.epsilon_total, 10.0, 1e-12);
  EXPECT_NEAR(ledger.delta_total, 1e-4, 1e-18);
}

TEST(BudgetLedgerTest, DisabledPrivacyChargesNothing) {
  const auto params = MakePrivacyParams(false, 1.0, 1e-5, 1.0);
  EXPECT_EQ(params.sigma, 0.0);
  const BudgetLedger ledger = RecordRound(BudgetLedger{}, params);
  EXPECT_EQ(ledger.epsilon_total, 0.0);
}

}  // namespace
}  // namespace fedsel
