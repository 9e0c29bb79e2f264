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

#ifndef FEDSEL_EXPERIMENT_H_
#define FEDSEL_EXPERIMENT_H_

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "fedsel/config.h"
#include "fedsel/orchestrator.h"
#include "json.hpp"

namespace fedsel {

struct PreparedData {
  Dataset train;
  Dataset test;
  std::vector<ClientRecord> registry;
};

// Loads or generates the data, normalizes it, splits train/test, partitions
// the training set and draws client capacities, all from master_seed.
PreparedData PrepareData(const ExperimentConfig& cfg);

struct ExperimentSummary {
  EvalReport initial_eval;
  EvalReport final_eval;
  std::size_t rounds = 0;
  double total_sim_time_s = 0.0;
  double wall_time_s = 0.0;
  BudgetLedger ledger;
  std::size_t failures = 0;
  std::size_t recoveries = 0;
  std::vector<std::vector<ClientId>> selected_history;
};

struct ExperimentResult {
  std::vector<RoundReport> reports;
  ExperimentSummary summary;
  GlobalModel final_model;
};

struct RunOptions {
  // Checkpoints go to <checkpoint_dir>/ckpt/... when set, memory otherwise.
  std::filesystem::path checkpoint_dir;
  // Called after every round, in round order.
  std::function<void(const RoundReport&)> on_round;
};

ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               const RunOptions& options = {});

// One reports.jsonl line (no trailing newline). Keys, in order: round,
// selected, accuracy, auc_roc, loss, sim_time_s, wall_time_s, eps_total,
// failures, recoveries, k_next.
std::string RoundReportToJsonLine(const RoundReport& report);

nlohmann::ordered_json SummaryToJson(const ExperimentSummary& summary,
                                     const ExperimentConfig& cfg);

}  // namespace fedsel

#endif  // FEDSEL_EXPERIMENT_H_
