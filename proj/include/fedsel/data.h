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

#ifndef FEDSEL_DATA_H_
#define FEDSEL_DATA_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace fedsel {

// Read-only view over a contiguous run of samples: row-major features plus
// the matching labels.
struct BatchView {
  std::span<const double> features;
  std::span<const int> labels;
  std::size_t n_features = 0;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return features.subspan(i * n_features, n_features);
  }
};

// Binary-labelled tabular data stored row-major.
struct Dataset {
  std::size_t n_features = 0;
  std::vector<double> features;
  std::vector<int> labels;
  std::vector<std::string> feature_names;

  std::size_t size() const { return labels.size(); }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(features).subspan(i * n_features,
                                                     n_features);
  }
  // Samples [begin, end).
  BatchView Slice(std::size_t begin, std::size_t end) const;
  BatchView All() const { return Slice(0, size()); }

  // Copies the given rows, in order, into a new dataset.
  Dataset Subset(std::span<const std::size_t> indices) const;

  bool operator==(const Dataset&) const = default;
};

enum class PartitionStrategy { kIid, kDirichlet };

struct PartitionSpec {
  PartitionStrategy strategy = PartitionStrategy::kIid;
  double alpha = 1.0;  // Dirichlet concentration; ignored for IID.
  std::uint64_t seed = 0;
};

struct PartitionPlan {
  std::vector<std::vector<std::size_t>> assignments;  // one list per client
  PartitionSpec spec;
};

// Two unit-variance Gaussian clusters centred at -class_sep/2 (label 0) and
// +class_sep/2 (label 1) in every feature. Labels alternate, so classes are
// balanced within one sample.
Dataset GenerateSynthetic(std::size_t n_samples, std::size_t n_features,
                          double class_sep, std::uint64_t seed);

// Reads a headed, comma-separated file. `label_column` must hold 0/1 values;
// every other column becomes a numeric feature. Throws IngestionError.
Dataset LoadCsv(const std::filesystem::path& path,
                const std::string& label_column);

// Per-feature z-score. Zero-variance features become all zeros.
Dataset Normalize(const Dataset& dataset);

PartitionPlan Partition(const Dataset& dataset, std::size_t n_clients,
                        const PartitionSpec& spec);

// Largest majority-class fraction over all shards of `plan`. 0.5 means every
// shard is perfectly balanced; 1.0 means some shard is single-class.
double MaxLabelSkew(const Dataset& dataset, const PartitionPlan& plan);

struct TrainTestSplit {
  Dataset train;
  Dataset test;
};

// Shuffles by `seed` and puts the first round(train_fraction * n) samples in
// the training set. Both halves are kept non-empty when n >= 2.
TrainTestSplit SplitTrainTest(const Dataset& dataset, double train_fraction,
                              std::uint64_t seed);

}  // namespace fedsel

#endif  // FEDSEL_DATA_H_
