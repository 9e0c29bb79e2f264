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

#ifndef FEDSEL_ORCHESTRATOR_H_
#define FEDSEL_ORCHESTRATOR_H_

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fedsel/checkpoint.h"
#include "fedsel/cost_model.h"
#include "fedsel/data.h"
#include "fedsel/fault_tolerance.h"
#include "fedsel/model.h"
#include "fedsel/privacy.h"
#include "fedsel/selection.h"

namespace fedsel {

enum class Strategy {
  kProposed,  // utility top-K with adaptive K
  kRandom,    // uniform random k_init clients
  kFull,      // every available client
  kStaticK,   // utility top-K with K fixed at k_init
};

struct TrainingConfig {
  std::size_t local_epochs = 1;
  std::size_t batch_size = 16;
  double lr = 0.1;
  double server_lr = 1.0;

  bool operator==(const TrainingConfig&) const = default;
};

struct OrchestratorConfig {
  Strategy strategy = Strategy::kProposed;
  TrainingConfig training;
  SelectionConfig selection;
  PrivacyParams privacy;
  FaultToleranceConfig fault_tolerance;
  CostModel cost;
  double p_avail = 0.9;
  std::uint64_t master_seed = 0;
  // Worker threads for local training within a round; 1 runs serially.
  std::size_t threads = 1;
  // When false, RoundReport::wall_time_s is written as 0 so reports are
  // byte-reproducible.
  bool record_wall_clock = false;
};

struct ClientRecord {
  ClientId id = 0;
  Dataset shard;
  double compute_capacity = 1.0;
  std::uint64_t last_seen_round = 0;
  double recent_loss_delta = 0.0;

  ClientStats Stats() const;
};

struct ClientUpdate {
  ClientId client_id = 0;
  GradientVector noisy_update;
  std::size_t n_samples = 0;
  double local_time = 0.0;
  bool recovered = false;
  // Failed with recovery disabled; the update must not be aggregated.
  bool dropped = false;
  bool failed = false;
  std::uint64_t steps_executed = 0;
  std::uint64_t saves = 0;
  std::uint64_t recoveries = 0;
};

struct RoundState {
  std::uint64_t round = 0;  // last completed round; 0 before the first
  std::vector<ClientId> available;
  std::vector<ClientId> selected;
  std::size_t k_current = 0;
};

struct RoundReport {
  std::uint64_t round = 0;
  std::vector<ClientId> selected;
  EvalReport eval;
  double sim_time_s = 0.0;
  double wall_time_s = 0.0;
  BudgetLedger ledger;
  std::size_t failures = 0;
  std::size_t recoveries = 0;
  std::size_t k_next = 0;
  bool skipped = false;
};

// E * ceil(n_samples / batch_size).
std::uint64_t LocalStepCount(std::size_t n_samples, const TrainingConfig& cfg);

// Sequential minibatch SGD from `global`, then update = global - local,
// clipped and noised when privacy is enabled. `failure` (if any) is honoured
// through `store`: with recovery enabled the client restores its latest
// checkpoint and replays; otherwise the update is marked dropped.
ClientUpdate LocalTrain(const ClientRecord& client, const GlobalModel& global,
                        std::uint64_t round, const OrchestratorConfig& cfg,
                        const std::optional<FailureEvent>& failure,
                        CheckpointStore& store);

// Sample-weighted mean of the updates, summed in client-id order so the
// result does not depend on list order. nullopt for an empty list.
std::optional<GradientVector> Aggregate(std::span<const ClientUpdate> updates);

// Runs the synchronous round protocol over a fixed client registry.
class Orchestrator {
 public:
  Orchestrator(OrchestratorConfig cfg, std::vector<ClientRecord> registry,
               Dataset test_set, GlobalModel initial_model,
               std::unique_ptr<CheckpointStore> store);

  // One full round: availability, scoring, selection, local training with
  // failure handling, aggregation, global update, evaluation, accounting and
  // the next K.
  RoundReport RunRound();

  const GlobalModel& model() const { return model_; }
  const RoundState& state() const { return state_; }
  const BudgetLedger& ledger() const { return ledger_; }
  const EvalReport& initial_eval() const { return initial_eval_; }
  std::span<const ClientRecord> registry() const { return registry_; }

 private:
  std::vector<ClientId> SampleAvailability(std::uint64_t round) const;
  std::vector<ClientId> Select(std::span<const ClientId> available,
                               std::uint64_t round) const;
  std::vector<ClientUpdate> TrainSelected(
      std::span<const ClientId> selected,
      std::span<const std::optional<FailureEvent>> failures,
      std::uint64_t round);

  OrchestratorConfig cfg_;
  std::vector<ClientRecord> registry_;
  Dataset test_set_;
  GlobalModel model_;
  std::unique_ptr<CheckpointStore> store_;
  RegistryMaxima maxima_;
  RoundState state_;
  BudgetLedger ledger_;
  EvalReport initial_eval_;
  double last_accuracy_ = 0.0;
};

}  // namespace fedsel

#endif  // FEDSEL_ORCHESTRATOR_H_
