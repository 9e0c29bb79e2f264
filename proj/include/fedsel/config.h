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

#ifndef FEDSEL_CONFIG_H_
#define FEDSEL_CONFIG_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "fedsel/cost_model.h"
#include "fedsel/data.h"
#include "fedsel/fault_tolerance.h"
#include "fedsel/model.h"
#include "fedsel/orchestrator.h"
#include "fedsel/selection.h"
#include "json.hpp"

namespace fedsel {

enum class DataSource { kSynthetic, kCsv };

struct DataConfig {
  DataSource source = DataSource::kSynthetic;
  std::size_t n_samples = 2000;
  std::size_t n_features = 10;
  double class_sep = 2.0;
  std::string path;
  std::string label_column = "label";
  double train_fraction = 0.8;

  bool operator==(const DataConfig&) const = default;
};

struct PrivacyConfig {
  bool enabled = true;
  double epsilon_round = 10.0;
  double delta = 1e-5;
  double clip_norm = 1.0;

  bool operator==(const PrivacyConfig&) const = default;
};

// Client compute capacities are drawn uniformly from [min, max].
struct CapacityConfig {
  double min = 1.0;
  double max = 1.0;

  bool operator==(const CapacityConfig&) const = default;
};

struct ExperimentConfig {
  DataConfig data;
  std::size_t n_clients = 10;
  PartitionStrategy partition = PartitionStrategy::kIid;
  double dirichlet_alpha = 0.5;
  ModelKind model = ModelKind::kLogistic;
  std::size_t hidden_width = 8;
  std::size_t rounds = 0;
  TrainingConfig training;
  Strategy strategy = Strategy::kProposed;
  SelectionConfig selection;
  double p_avail = 0.9;
  CapacityConfig capacity;
  PrivacyConfig privacy;
  FaultToleranceConfig fault_tolerance;
  CostModel cost_model;
  std::uint64_t master_seed = 0;
  std::string output_dir = "run";
  std::size_t threads = 1;
  bool record_wall_clock = false;

  bool operator==(const ExperimentConfig&) const = default;
};

enum class SweepAxis { kEpsilon, kK, kFailureProb, kCheckpointInterval };

struct SweepSpec {
  ExperimentConfig base;
  SweepAxis axis = SweepAxis::kEpsilon;
  std::vector<double> values;
  std::vector<std::uint64_t> seeds;
  std::string output_dir = "sweep";
  std::size_t jobs = 1;  // child runs executed concurrently
};

const char* StrategyName(Strategy s);
const char* AxisName(SweepAxis a);

// Strict parse: "data" and "rounds" are required, every other key has a
// default, unknown keys are rejected. Throws ConfigError listing every
// violation by dotted key path.
ExperimentConfig ParseConfig(const nlohmann::json& doc);
ExperimentConfig LoadConfig(const std::filesystem::path& path);

// Every field, so that ParseConfig(ConfigToJson(c)) == c.
nlohmann::ordered_json ConfigToJson(const ExperimentConfig& cfg);

// Applies "a.b.c=value" to a raw config document. The value is parsed as JSON
// when possible and kept as a string otherwise.
void ApplyOverride(nlohmann::json& doc, const std::string& assignment);

// Expects {"base": {...} | "path", "axis", "values", "seeds"} plus optional
// "output_dir" and "jobs". A string base is resolved relative to the sweep
// file's directory.
SweepSpec LoadSweepSpec(const std::filesystem::path& path);
SweepSpec ParseSweepSpec(const nlohmann::json& doc,
                         const std::filesystem::path& base_dir);

// The base config with the axis set to `value` and master_seed to `seed`.
ExperimentConfig ApplySweepPoint(const ExperimentConfig& base, SweepAxis axis,
                                 double value, std::uint64_t seed);

// Orchestrator settings implied by an experiment config.
OrchestratorConfig MakeOrchestratorConfig(const ExperimentConfig& cfg);

}  // namespace fedsel

#endif  // FEDSEL_CONFIG_H_
