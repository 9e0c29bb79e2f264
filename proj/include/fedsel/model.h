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

#ifndef FEDSEL_MODEL_H_
#define FEDSEL_MODEL_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fedsel/data.h"

namespace fedsel {

enum class ModelKind { kLogistic, kMlp };

struct Architecture {
  ModelKind kind = ModelKind::kLogistic;
  std::size_t n_features = 0;
  std::size_t hidden_width = 0;  // MLP only

  static Architecture Logistic(std::size_t n_features) {
    return {ModelKind::kLogistic, n_features, 0};
  }
  static Architecture Mlp(std::size_t n_features, std::size_t hidden_width) {
    return {ModelKind::kMlp, n_features, hidden_width};
  }

  // Logistic: n_features weights + bias.
  // MLP: hidden x n_features weights, hidden biases, hidden output weights,
  // output bias, in that order.
  std::size_t ParameterCount() const;

  bool operator==(const Architecture&) const = default;
};

// A model delta or loss gradient, aligned with GlobalModel::params.
struct GradientVector {
  std::vector<double> values;

  std::size_t size() const { return values.size(); }
  bool operator==(const GradientVector&) const = default;
};

struct GlobalModel {
  Architecture arch;
  std::vector<double> params;
  std::uint64_t version = 0;  // bumped once per aggregation

  bool operator==(const GlobalModel&) const = default;
};

struct LossAndGradient {
  double loss = 0.0;
  GradientVector grad;
};

struct EvalReport {
  double accuracy = 0.0;
  double auc_roc = 0.5;
  double loss = 0.0;
  // Set when the evaluation set holds a single class; auc_roc is then 0.5.
  bool auc_degenerate = false;
};

// Logistic models start at zero. MLP layers draw from
// U[-1/sqrt(fan_in), 1/sqrt(fan_in)] using `seed`.
GlobalModel InitModel(const Architecture& arch, std::uint64_t seed);

// Predicted P(y = 1 | x) for one feature row.
double PredictProbability(const GlobalModel& model, std::span<const double> x);

// Mean binary cross-entropy over `batch` and its exact gradient.
LossAndGradient ComputeLossAndGradient(const GlobalModel& model,
                                       const BatchView& batch);

// params - lr * update. The version is left unchanged.
GlobalModel ApplyUpdate(const GlobalModel& model, const GradientVector& update,
                        double lr);

EvalReport Evaluate(const GlobalModel& model, const Dataset& dataset,
                    double threshold = 0.5);

// Mann-Whitney AUC from average ranks, ties counting 1/2. Returns 0.5 when
// either class is absent.
double AucRoc(std::span<const double> scores, std::span<const int> labels);

}  // namespace fedsel

#endif  // FEDSEL_MODEL_H_
