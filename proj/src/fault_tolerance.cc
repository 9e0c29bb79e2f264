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

#include "fedsel/fault_tolerance.h"

#include <random>

#include "fedsel/error.h"

namespace fedsel {

void ValidateFaultToleranceConfig(const FaultToleranceConfig& cfg) {
  if (cfg.enabled && cfg.checkpoint_interval_steps < 1) {
    throw ParameterError("checkpoint_interval_steps must be >= 1");
  }
  if (!(cfg.failure_prob_per_round >= 0.0 &&
        cfg.failure_prob_per_round <= 1.0)) {
    throw ParameterError("failure_prob_per_round must lie in [0, 1]");
  }
}

bool ShouldCheckpoint(std::uint64_t step, std::uint64_t interval) {
  if (interval < 1) throw ParameterError("checkpoint interval must be >= 1");
  return step >= 1 && step % interval == 0;
}

std::vector<FailureEvent> SampleFailures(
    std::span<const ClientId> selected,
    std::span<const std::uint64_t> steps_per_client, std::uint64_t round,
    double failure_prob, RngStream& rng) {
  if (selected.size() != steps_per_client.size()) {
    throw ShapeError("steps_per_client must align with selected clients");
  }
  if (!(failure_prob >= 0.0 && failure_prob <= 1.0)) {
    throw ParameterError("failure_prob must lie in [0, 1]");
  }
  std::vector<FailureEvent> events;
  if (failure_prob == 0.0) return events;
  std::bernoulli_distribution fails(failure_prob);
  for (std::size_t i = 0; i < selected.size(); ++i) {
    if (!fails(rng) || steps_per_client[i] == 0) continue;
    std::uniform_int_distribution<std::uint64_t> at(0,
                                                    steps_per_client[i] - 1);
    events.push_back({selected[i], round, at(rng)});
  }
  return events;
}

RecoveryPoint Recover(ClientId client_id, std::uint64_t round,
                      CheckpointStore& store,
                      std::span<const double> initial_params) {
  RecoveryPoint point;
  const auto record = store.Load(client_id, round);
  if (!record) {
    point.params.assign(initial_params.begin(), initial_params.end());
    return point;
  }
  if (record->client_id != client_id || record->round != round ||
      record->model_params.size() != initial_params.size()) {
    throw IntegrityError("checkpoint for client " + std::to_string(client_id) +
                         " round " + std::to_string(round) +
                         " does not match the current model");
  }
  point.resume_step = record->step;
  point.params = record->model_params;
  point.rng_cursor = record->rng_cursor;
  point.from_checkpoint = true;
  return point;
}

}  // namespace fedsel
