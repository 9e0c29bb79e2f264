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

#include "fedsel/data.h"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "fedsel/error.h"
#include "fedsel/rng.h"

namespace fedsel {
namespace {

std::string Trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string> SplitLine(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(Trim(cell));
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

bool ParseDouble(const std::string& text, double& out) {
  if (text.empty()) return false;
  char* end = nullptr;
  errno = 0;
  out = std::strtod(text.c_str(), &end);
  return errno == 0 && end == text.c_str() + text.size() && std::isfinite(out);
}

std::vector<std::size_t> Iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return v;
}

}  // namespace

BatchView Dataset::Slice(std::size_t begin, std::size_t end) const {
  if (begin > end || end > size()) {
    throw ShapeError("slice [" + std::to_string(begin) + ", " +
                     std::to_string(end) + ") out of range for " +
                     std::to_string(size()) + " samples");
  }
  BatchView view;
  view.n_features = n_features;
  view.features = std::span<const double>(features).subspan(
      begin * n_features, (end - begin) * n_features);
  view.labels = std::span<const int>(labels).subspan(begin, end - begin);
  return view;
}

Dataset Dataset::Subset(std::span<const std::size_t> indices) const {
  Dataset out;
  out.n_features = n_features;
  out.feature_names = feature_names;
  out.features.reserve(indices.size() * n_features);
  out.labels.reserve(indices.size());
  for (std::size_t idx : indices) {
    const auto r = row(idx);
    out.features.insert(out.features.end(), r.begin(), r.end());
    out.labels.push_back(labels[idx]);
  }
  return out;
}

Dataset GenerateSynthetic(std::size_t n_samples, std::size_t n_features,
                          double class_sep, std::uint64_t seed) {
  if (n_samples < 2) throw ParameterError("n_samples must be >= 2");
  if (n_features < 1) throw ParameterError("n_features must be >= 1");
  if (!(class_sep > 0.0) || !std::isfinite(class_sep)) {
    throw ParameterError("class_sep must be a positive finite number");
  }
  RngStream rng(seed, StreamPurpose::kData);
  std::normal_distribution<double> unit(0.0, 1.0);

  Dataset d;
  d.n_features = n_features;
  d.features.reserve(n_samples * n_features);
  d.labels.reserve(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const int label = static_cast<int>(i % 2);
    const double mean = label == 1 ? class_sep / 2.0 : -class_sep / 2.0;
    for (std::size_t f = 0; f < n_features; ++f) {
      d.features.push_back(mean + unit(rng));
    }
    d.labels.push_back(label);
  }
  for (std::size_t f = 0; f < n_features; ++f) {
    d.feature_names.push_back("x" + std::to_string(f));
  }
  return d;
}

Dataset LoadCsv(const std::filesystem::path& path,
                const std::string& label_column) {
  std::ifstream in(path);
  if (!in) throw IngestionError("cannot open CSV file '" + path.string() + "'");

  std::string line;
  if (!std::getline(in, line) || Trim(line).empty()) {
    throw IngestionError("CSV file '" + path.string() + "' is empty");
  }
  const std::vector<std::string> header = SplitLine(line);
  const auto label_it = std::find(header.begin(), header.end(), label_column);
  if (label_it == header.end()) {
    throw IngestionError("CSV file '" + path.string() +
                         "' has no column named '" + label_column + "'");
  }
  const std::size_t label_idx =
      static_cast<std::size_t>(label_it - header.begin());

  Dataset d;
  d.n_features = header.size() - 1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (c != label_idx) d.feature_names.push_back(header[c]);
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    const std::vector<std::string> cells = SplitLine(line);
    const std::string where = "row " + std::to_string(line_no);
    if (cells.size() != header.size()) {
      throw IngestionError(where + ": expected " +
                           std::to_string(header.size()) + " cells, found " +
                           std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      double value = 0.0;
      if (!ParseDouble(cells[c], value)) {
        throw IngestionError(where + ", column '" + header[c] +
                             "': non-numeric value '" + cells[c] + "'");
      }
      if (c == label_idx) {
        if (value != 0.0 && value != 1.0) {
          throw IngestionError(where + ", column '" + header[c] +
                               "': label must be 0 or 1, got '" + cells[c] +
                               "'");
        }
        d.labels.push_back(static_cast<int>(value));
      } else {
        d.features.push_back(value);
      }
    }
  }
  if (d.labels.empty()) {
    throw IngestionError("CSV file '" + path.string() + "' has no data rows");
  }
  return d;
}

Dataset Normalize(const Dataset& dataset) {
  Dataset out = dataset;
  const std::size_t n = dataset.size();
  const std::size_t f = dataset.n_features;
  if (n == 0) return out;
  for (std::size_t j = 0; j < f; ++j) {
    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += dataset.features[i * f + j];
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = dataset.features[i * f + j] - mean;
      var += d * d;
    }
    var /= static_cast<double>(n);
    const double sd = std::sqrt(var);
    // Columns whose spread is at rounding level are treated as constant.
    const bool degenerate =
        !(sd > 1e-12 * std::max(1.0, std::abs(mean))) || !std::isfinite(sd);
    for (std::size_t i = 0; i < n; ++i) {
      double& v = out.features[i * f + j];
      v = degenerate ? 0.0 : (v - mean) / sd;
    }
  }
  return out;
}

PartitionPlan Partition(const Dataset& dataset, std::size_t n_clients,
                        const PartitionSpec& spec) {
  if (n_clients < 1) throw ParameterError("n_clients must be >= 1");
  if (n_clients > dataset.size()) {
    throw ParameterError("n_clients (" + std::to_string(n_clients) +
                         ") exceeds number of samples (" +
                         std::to_string(dataset.size()) + ")");
  }
  if (spec.strategy == PartitionStrategy::kDirichlet &&
      !(spec.alpha > 0.0 && std::isfinite(spec.alpha))) {
    throw ParameterError("dirichlet alpha must be positive");
  }

  PartitionPlan plan;
  plan.spec = spec;
  plan.assignments.assign(n_clients, {});
  RngStream rng(spec.seed, StreamPurpose::kPartition);

  if (spec.strategy == PartitionStrategy::kIid) {
    std::vector<std::size_t> order = Iota(dataset.size());
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t i = 0; i < order.size(); ++i) {
      plan.assignments[i % n_clients].push_back(order[i]);
    }
    return plan;
  }

  std::gamma_distribution<double> gamma(spec.alpha, 1.0);
  for (int label : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
      if (dataset.labels[i] == label) members.push_back(i);
    }
    std::shuffle(members.begin(), members.end(), rng);

    std::vector<double> weights(n_clients);
    double total = 0.0;
    for (double& w : weights) total += (w = gamma(rng));
    if (!(total > 0.0)) {
      std::fill(weights.begin(), weights.end(), 1.0);
      total = static_cast<double>(n_clients);
    }

    // Largest-remainder rounding so every member is assigned.
    const double m = static_cast<double>(members.size());
    std::vector<std::size_t> counts(n_clients);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t j = 0; j < n_clients; ++j) {
      const double exact = weights[j] / total * m;
      counts[j] = static_cast<std::size_t>(std::floor(exact));
      assigned += counts[j];
      remainders.emplace_back(exact - std::floor(exact), j);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) {
                       return a.first > b.first;
                     });
    for (std::size_t r = 0; assigned < members.size(); ++r, ++assigned) {
      ++counts[remainders[r % n_clients].second];
    }

    std::size_t cursor = 0;
    for (std::size_t j = 0; j < n_clients; ++j) {
      for (std::size_t c = 0; c < counts[j]; ++c) {
        plan.assignments[j].push_back(members[cursor++]);
      }
    }
  }

  // Every client needs at least one sample: move one from the largest shard.
  for (auto& shard : plan.assignments) {
    if (!shard.empty()) continue;
    auto largest = std::max_element(
        plan.assignments.begin(), plan.assignments.end(),
        [](const auto& a, const auto& b) { return a.size() < b.size(); });
    shard.push_back(largest->back());
    largest->pop_back();
  }
  for (auto& shard : plan.assignments) std::sort(shard.begin(), shard.end());
  return plan;
}

double MaxLabelSkew(const Dataset& dataset, const PartitionPlan& plan) {
  double worst = 0.0;
  for (const auto& shard : plan.assignments) {
    if (shard.empty()) continue;
    std::size_t positives = 0;
    for (std::size_t idx : shard) positives += dataset.labels[idx] == 1;
    const double frac =
        static_cast<double>(positives) / static_cast<double>(shard.size());
    worst = std::max(worst, std::max(frac, 1.0 - frac));
  }
  return worst;
}

TrainTestSplit SplitTrainTest(const Dataset& dataset, double train_fraction,
                              std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw ParameterError("train_fraction must lie in (0, 1)");
  }
  if (dataset.size() < 2) {
    throw ParameterError("need at least 2 samples to split");
  }
  RngStream rng(seed, StreamPurpose::kSplit);
  std::vector<std::size_t> order = Iota(dataset.size());
  std::shuffle(order.begin(), order.end(), rng);
  auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(dataset.size())));
  n_train = std::clamp<std::size_t>(n_train, 1, dataset.size() - 1);
  const std::span<const std::size_t> all(order);
  return {dataset.Subset(all.first(n_train)),
          dataset.Subset(all.subspan(n_train))};
}

}  // namespace fedsel
