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

#include "fedsel/experiment.h"

#include <chrono>
#include <memory>
#include <random>

#include "fedsel/error.h"
#include "fedsel/rng.h"

namespace fedsel {
namespace {

nlohmann::ordered_json EvalToJson(const EvalReport& e) {
  return {{"accuracy", e.accuracy},
          {"auc_roc", e.auc_roc},
          {"loss", e.loss},
          {"auc_degenerate", e.auc_degenerate}};
}

}  // namespace

PreparedData PrepareData(const ExperimentConfig& cfg) {
  Dataset full;
  if (cfg.data.source == DataSource::kSynthetic) {
    full = GenerateSynthetic(cfg.data.n_samples, cfg.data.n_features,
                             cfg.data.class_sep, cfg.master_seed);
  } else {
    full = LoadCsv(cfg.data.path, cfg.data.label_column);
  }
  full = Normalize(full);

  PreparedData out;
  auto split = SplitTrainTest(full, cfg.data.train_fraction, cfg.master_seed);
  out.train = std::move(split.train);
  out.test = std::move(split.test);

  PartitionSpec spec;
  spec.strategy = cfg.partition;
  spec.alpha = cfg.dirichlet_alpha;
  spec.seed = cfg.master_seed;
  const PartitionPlan plan = Partition(out.train, cfg.n_clients, spec);

  RngStream rng(cfg.master_seed, StreamPurpose::kCapacity);
  std::uniform_real_distribution<double> capacity(cfg.capacity.min,
                                                  cfg.capacity.max);
  for (std::size_t i = 0; i < plan.assignments.size(); ++i) {
    ClientRecord c;
    c.id = static_cast<ClientId>(i);
    c.shard = out.train.Subset(plan.assignments[i]);
    c.compute_capacity = cfg.capacity.max > cfg.capacity.min
                             ? capacity(rng)
                             : cfg.capacity.min;
    out.registry.push_back(std::move(c));
  }
  return out;
}

ExperimentResult RunExperiment(const ExperimentConfig& cfg,
                               const RunOptions& options) {
  const auto wall_start = std::chrono::steady_clock::now();
  PreparedData data = PrepareData(cfg);

  const Architecture arch =
      cfg.model == ModelKind::kLogistic
          ? Architecture::Logistic(data.train.n_features)
          : Architecture::Mlp(data.train.n_features, cfg.hidden_width);
  std::unique_ptr<CheckpointStore> store;
  if (!options.checkpoint_dir.empty()) {
    store = std::make_unique<FileCheckpointStore>(options.checkpoint_dir);
  } else {
    store = std::make_unique<MemoryCheckpointStore>();
  }
  Orchestrator orchestrator(MakeOrchestratorConfig(cfg),
                            std::move(data.registry), std::move(data.test),
                            InitModel(arch, cfg.master_seed), std::move(store));

  ExperimentResult result;
  ExperimentSummary& s = result.summary;
  s.initial_eval = orchestrator.initial_eval();
  s.final_eval = s.initial_eval;
  for (std::size_t t = 0; t < cfg.rounds; ++t) {
    RoundReport report = orchestrator.RunRound();
    s.final_eval = report.eval;
    s.total_sim_time_s += report.sim_time_s;
    s.failures += report.failures;
    s.recoveries += report.recoveries;
    s.selected_history.push_back(report.selected);
    ++s.rounds;
    if (options.on_round) options.on_round(report);
    result.reports.push_back(std::move(report));
  }
  s.ledger = orchestrator.ledger();
  result.final_model = orchestrator.model();
  if (cfg.record_wall_clock) {
    s.wall_time_s = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - wall_start)
                        .count();
  }
  return result;
}

std::string RoundReportToJsonLine(const RoundReport& r) {
  nlohmann::ordered_json j;
  j["round"] = r.round;
  j["selected"] = r.selected;
  j["accuracy"] = r.eval.accuracy;
  j["auc_roc"] = r.eval.auc_roc;
  j["loss"] = r.eval.loss;
  j["sim_time_s"] = r.sim_time_s;
  j["wall_time_s"] = r.wall_time_s;
  j["eps_total"] = r.ledger.epsilon_total;
  j["failures"] = r.failures;
  j["recoveries"] = r.recoveries;
  j["k_next"] = r.k_next;
  return j.dump();
}

nlohmann::ordered_json SummaryToJson(const ExperimentSummary& s,
                                     const ExperimentConfig& cfg) {
  nlohmann::ordered_json j;
  j["rounds"] = s.rounds;
  j["final_accuracy"] = s.final_eval.accuracy;
  j["final_auc"] = s.final_eval.auc_roc;
  j["final_loss"] = s.final_eval.loss;
  j["total_sim_time_s"] = s.total_sim_time_s;
  j["eps_total"] = s.ledger.epsilon_total;
  j["delta_total"] = s.ledger.delta_total;
  j["failures"] = s.failures;
  j["recoveries"] = s.recoveries;
  j["wall_time_s"] = s.wall_time_s;
  j["initial_eval"] = EvalToJson(s.initial_eval);
  j["final_eval"] = EvalToJson(s.final_eval);
  j["selected_history"] = s.selected_history;
  j["config"] = ConfigToJson(cfg);
  return j;
}

}  // namespace fedsel
