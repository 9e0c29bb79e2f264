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

#include "fedsel/model.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>

#include "fedsel/error.h"
#include "fedsel/rng.h"

namespace fedsel {
namespace {

// log(1 + exp(z)) without overflow.
double Softplus(double z) {
  return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z));
}

double Sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

void CheckWidth(const GlobalModel& model, std::size_t width) {
  if (width != model.arch.n_features) {
    throw ShapeError("feature width " + std::to_string(width) +
                     " does not match model input width " +
                     std::to_string(model.arch.n_features));
  }
  if (model.params.size() != model.arch.ParameterCount()) {
    throw ShapeError("model has " + std::to_string(model.params.size()) +
                     " parameters, architecture expects " +
                     std::to_string(model.arch.ParameterCount()));
  }
}

// Offsets into the flat MLP parameter vector.
struct MlpLayout {
  std::size_t in, hidden;
  std::size_t w1() const { return 0; }
  std::size_t b1() const { return hidden * in; }
  std::size_t w2() const { return b1() + hidden; }
  std::size_t b2() const { return w2() + hidden; }
};

// Output logit; fills `hidden_out` with tanh activations for MLPs.
double Forward(const GlobalModel& model, std::span<const double> x,
               std::vector<double>& hidden_out) {
  const auto& p = model.params;
  const std::size_t f = model.arch.n_features;
  if (model.arch.kind == ModelKind::kLogistic) {
    double z = p[f];
    for (std::size_t j = 0; j < f; ++j) z += p[j] * x[j];
    return z;
  }
  const MlpLayout l{f, model.arch.hidden_width};
  hidden_out.resize(l.hidden);
  double z = p[l.b2()];
  for (std::size_t h = 0; h < l.hidden; ++h) {
    double a = p[l.b1() + h];
    for (std::size_t j = 0; j < f; ++j) a += p[l.w1() + h * f + j] * x[j];
    hidden_out[h] = std::tanh(a);
    z += p[l.w2() + h] * hidden_out[h];
  }
  return z;
}

}  // namespace

std::size_t Architecture::ParameterCount() const {
  if (kind == ModelKind::kLogistic) return n_features + 1;
  return hidden_width * n_features + hidden_width + hidden_width + 1;
}

GlobalModel InitModel(const Architecture& arch, std::uint64_t seed) {
  if (arch.n_features < 1) throw ParameterError("model needs >= 1 feature");
  if (arch.kind == ModelKind::kMlp && arch.hidden_width < 1) {
    throw ParameterError("MLP hidden_width must be >= 1");
  }
  GlobalModel model;
  model.arch = arch;
  model.params.assign(arch.ParameterCount(), 0.0);
  if (arch.kind == ModelKind::kLogistic) return model;

  RngStream rng(seed, StreamPurpose::kModelInit);
  const MlpLayout l{arch.n_features, arch.hidden_width};
  const double r1 = 1.0 / std::sqrt(static_cast<double>(l.in));
  const double r2 = 1.0 / std::sqrt(static_cast<double>(l.hidden));
  std::uniform_real_distribution<double> first(-r1, r1);
  std::uniform_real_distribution<double> second(-r2, r2);
  for (std::size_t i = 0; i < l.w2(); ++i) model.params[i] = first(rng);
  for (std::size_t i = l.w2(); i < model.params.size(); ++i) {
    model.params[i] = second(rng);
  }
  return model;
}

double PredictProbability(const GlobalModel& model,
                          std::span<const double> x) {
  CheckWidth(model, x.size());
  std::vector<double> hidden;
  return Sigmoid(Forward(model, x, hidden));
}

LossAndGradient ComputeLossAndGradient(const GlobalModel& model,
                                       const BatchView& batch) {
  if (batch.size() == 0) throw ShapeError("empty batch");
  CheckWidth(model, batch.n_features);

  const std::size_t f = model.arch.n_features;
  LossAndGradient out;
  out.grad.values.assign(model.params.size(), 0.0);
  auto& g = out.grad.values;
  std::vector<double> hidden;
  const MlpLayout l{f, model.arch.hidden_width};

  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto x = batch.row(i);
    const double y = batch.labels[i];
    const double z = Forward(model, x, hidden);
    out.loss += Softplus(z) - y * z;
    const double dz = Sigmoid(z) - y;  // d loss / d logit
    if (model.arch.kind == ModelKind::kLogistic) {
      for (std::size_t j = 0; j < f; ++j) g[j] += dz * x[j];
      g[f] += dz;
      continue;
    }
    g[l.b2()] += dz;
    for (std::size_t h = 0; h < l.hidden; ++h) {
      g[l.w2() + h] += dz * hidden[h];
      const double da =
          dz * model.params[l.w2() + h] * (1.0 - hidden[h] * hidden[h]);
      g[l.b1() + h] += da;
      for (std::size_t j = 0; j < f; ++j) g[l.w1() + h * f + j] += da * x[j];
    }
  }
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  out.loss *= inv_n;
  for (double& v : g) v *= inv_n;
  return out;
}

GlobalModel ApplyUpdate(const GlobalModel& model, const GradientVector& update,
                        double lr) {
  if (update.size() != model.params.size()) {
    throw ShapeError("update length " + std::to_string(update.size()) +
                     " does not match model length " +
                     std::to_string(model.params.size()));
  }
  GlobalModel out = model;
  for (std::size_t i = 0; i < out.params.size(); ++i) {
    out.params[i] -= lr * update.values[i];
  }
  return out;
}

double AucRoc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) {
    throw ShapeError("scores and labels differ in length");
  }
  const std::size_t n = scores.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Ranks are 1-based; a tie group spanning ranks [lo, hi] gets (lo + hi) / 2.
  double positive_rank_sum = 0.0;
  std::size_t n_pos = 0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j + 1);
    for (std::size_t k = i; k <= j; ++k) {
      if (labels[order[k]] == 1) {
        positive_rank_sum += avg_rank;
        ++n_pos;
      }
    }
    i = j + 1;
  }
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) return 0.5;
  const double np = static_cast<double>(n_pos);
  const double u = positive_rank_sum - np * (np + 1.0) / 2.0;
  return u / (np * static_cast<double>(n_neg));
}

EvalReport Evaluate(const GlobalModel& model, const Dataset& dataset,
                    double threshold) {
  if (dataset.size() == 0) throw ShapeError("cannot evaluate on empty dataset");
  CheckWidth(model, dataset.n_features);

  EvalReport report;
  std::vector<double> scores(dataset.size());
  std::vector<double> hidden;
  std::size_t correct = 0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < dataset.size(); ++i) {
    const double z = Forward(model, dataset.row(i), hidden);
    const int y = dataset.labels[i];
    scores[i] = Sigmoid(z);
    report.loss += Softplus(z) - y * z;
    correct += static_cast<int>(scores[i] >= threshold) == y;
    positives += y == 1;
  }
  const double n = static_cast<double>(dataset.size());
  report.loss = std::max(0.0, report.loss / n);
  report.accuracy = static_cast<double>(correct) / n;
  report.auc_degenerate = positives == 0 || positives == dataset.size();
  report.auc_roc = AucRoc(scores, dataset.labels);
  return report;
}

}  // namespace fedsel
