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

#include "fedsel/config.h"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "fedsel/error.h"

namespace fedsel {
namespace {

using nlohmann::json;

json Minimal() {
  return json::parse(R"({"data": {"source": "synthetic"}, "rounds": 5})");
}

std::vector<std::string> IssuePaths(const json& doc) {
  try {
    ParseConfig(doc);
  } catch (const ConfigError& e) {
    std::vector<std::string> paths;
    for (const auto& issue : e.issues()) paths.push_back(issue.key_path);
    return paths;
  }
  return {};
}

TEST(ParseConfigTest, MinimalDocumentUsesDefaults) {
  const auto cfg = ParseConfig(Minimal());
  EXPECT_EQ(cfg.rounds, 5u);
  EXPECT_EQ(cfg.n_clients, 10u);
  EXPECT_EQ(cfg.strategy, Strategy::kProposed);
  EXPECT_EQ(cfg.selection.k_init, 5u);
  EXPECT_EQ(cfg.training.batch_size, 16u);
  EXPECT_DOUBLE_EQ(cfg.privacy.delta, 1e-5);
  EXPECT_EQ(cfg.fault_tolerance.checkpoint_interval_steps, 5u);
  EXPECT_EQ(cfg.data.n_samples, 2000u);
}

TEST(ParseConfigTest, NegativeEpsilonNamesItsPath) {
  auto doc = Minimal();
  doc["privacy"] = {{"epsilon_round", -1}};
  EXPECT_EQ(IssuePaths(doc), std::vector<std::string>{"privacy.epsilon_round"});
}

TEST(ParseConfigTest, UnknownKeyIsRejected) {
  auto doc = Minimal();
  doc["foo"] = 1;
  EXPECT_EQ(IssuePaths(doc), std::vector<std::string>{"foo"});
  doc = Minimal();
  doc["selection"] = {{"k_inti", 3}};
  EXPECT_EQ(IssuePaths(doc), std::vector<std::string>{"selection.k_inti"});
}

TEST(ParseConfigTest, ReportsEveryIssue) {
  json doc = json::parse(R"({"n_clients": 0, "strategy": "bogus",
                             "selection": {"k_min": 4, "k_init": 2}})");
  const auto paths = IssuePaths(doc);
  for (const char* expected : {"data", "rounds", "n_clients", "strategy"}) {
    EXPECT_NE(std::find(paths.begin(), paths.end(), expected), paths.end())
        << expected;
  }
  EXPECT_GE(paths.size(), 5u);
}

TEST(ParseConfigTest, WrongTypeIsAnIssue) {
  auto doc = Minimal();
  doc["rounds"] = "five";
  EXPECT_EQ(IssuePaths(doc), std::vector<std::string>{"rounds"});
}

TEST(ConfigToJsonTest, RoundTripsVariedConfigs) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    ExperimentConfig cfg = ParseConfig(Minimal());
    cfg.master_seed = seed * 7919;
    cfg.n_clients = 2 + seed % 9;
    cfg.strategy = static_cast<Strategy>(seed % 4);
    cfg.partition = seed % 2 ? PartitionStrategy::kDirichlet : PartitionStrategy::kIid;
    cfg.dirichlet_alpha = 0.1 + 0.37 * seed;
    cfg.model = seed % 3 ? ModelKind::kLogistic : ModelKind::kMlp;
    cfg.training.lr = 1.0 / (seed + 3);
    cfg.privacy.enabled = seed % 2 == 0;
    cfg.privacy.epsilon_round = 0.5 + seed;
    cfg.fault_tolerance.failure_prob_per_round = seed / 30.0;
    cfg.fault_tolerance.checkpoint_interval_steps = 1 + seed % 6;
    cfg.selection.k_max = 10 + seed;
    cfg.selection.w_data = 0.1 * (seed % 10);
    cfg.selection.w_compute = 1.0 - cfg.selection.w_data;
    cfg.cost_model.checkpoint_cost = 0.001 * seed;
    cfg.output_dir = "out_" + std::to_string(seed);
    const json text = json::parse(ConfigToJson(cfg).dump());
    EXPECT_EQ(ParseConfig(text), cfg) << seed;
  }
}

TEST(ApplyOverrideTest, DottedPathsAndValueTypes) {
  auto doc = Minimal();
  ApplyOverride(doc, "rounds=0");
  ApplyOverride(doc, "privacy.epsilon_round=2.5");
  ApplyOverride(doc, "strategy=random");
  ApplyOverride(doc, "fault_tolerance.enabled=false");
  const auto cfg = ParseConfig(doc);
  EXPECT_EQ(cfg.rounds, 0u);
  EXPECT_DOUBLE_EQ(cfg.privacy.epsilon_round, 2.5);
  EXPECT_EQ(cfg.strategy, Strategy::kRandom);
  EXPECT_FALSE(cfg.fault_tolerance.enabled);
  EXPECT_THROW(ApplyOverride(doc, "no_equals_sign"), ConfigError);
}

TEST(SweepSpecTest, InlineBaseAndPointApplication) {
  const json doc = {{"base", Minimal()},
                    {"axis", "epsilon"},
                    {"values", {1, 10}},
                    {"seeds", {0, 1, 2}}};
  const auto spec = ParseSweepSpec(doc, ".");
  EXPECT_EQ(spec.axis, SweepAxis::kEpsilon);
  EXPECT_EQ(spec.values.size(), 2u);
  EXPECT_EQ(spec.seeds.size(), 3u);

  auto base = spec.base;
  base.privacy.enabled = false;
  const auto point = ApplySweepPoint(base, SweepAxis::kEpsilon, 10.0, 2);
  EXPECT_TRUE(point.privacy.enabled);
  EXPECT_DOUBLE_EQ(point.privacy.epsilon_round, 10.0);
  EXPECT_EQ(point.master_seed, 2u);
  const auto k_point = ApplySweepPoint(base, SweepAxis::kK, 12.0, 0);
  EXPECT_EQ(k_point.selection.k_init, 12u);
  EXPECT_NO_THROW(ValidateSelectionConfig(k_point.selection));
}

TEST(SweepSpecTest, BaseMayBeRelativePath) {
  const auto dir = std::filesystem::temp_directory_path() / "fedsel_sweep_spec";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "base.json") << Minimal().dump();
  std::ofstream(dir / "sweep.json")
      << R"({"base": "base.json", "axis": "failure_prob",
             "values": [0.0, 0.1], "seeds": [0]})";
  const auto spec = LoadSweepSpec(dir / "sweep.json");
  EXPECT_EQ(spec.axis, SweepAxis::kFailureProb);
  EXPECT_EQ(spec.base.rounds, 5u);
}

TEST(SweepSpecTest, NestedIssuesArePrefixed) {
  json base = Minimal();
  base["privacy"] = {{"epsilon_round", -1}};
  const json doc = {{"base", base}, {"axis", "k"}, {"values", {2}},
                    {"seeds", {0}}};
  try {
    ParseSweepSpec(doc, ".");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    ASSERT_EQ(e.issues().size(), 1u);
    EXPECT_EQ(e.issues()[0].key_path, "base.privacy.epsilon_round");
  }
}

}  // namespace
}  // namespace fedsel
