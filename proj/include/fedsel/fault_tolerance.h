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

#ifndef FEDSEL_FAULT_TOLERANCE_H_
#define FEDSEL_FAULT_TOLERANCE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "fedsel/checkpoint.h"
#include "fedsel/rng.h"
#include "fedsel/selection.h"

namespace fedsel {

// Checkpoint and restore costs live in CostModel.
struct FaultToleranceConfig {
  bool enabled = true;
  std::uint64_t checkpoint_interval_steps = 5;  // t_c*
  // Failures are injected whether or not recovery is enabled. With recovery
  // disabled, a failed client's update is dropped from the round.
  double failure_prob_per_round = 0.0;

  bool operator==(const FaultToleranceConfig&) const = default;
};

// Client `client_id` crashes while executing local step `fail_at_step`
// (0-based), after computing it and before any checkpoint that would follow.
struct FailureEvent {
  ClientId client_id = 0;
  std::uint64_t round = 0;
  std::uint64_t fail_at_step = 0;

  bool operator==(const FailureEvent&) const = default;
};

void ValidateFaultToleranceConfig(const FaultToleranceConfig& cfg);

// True iff `step` completed steps is a multiple of `interval`.
bool ShouldCheckpoint(std::uint64_t step, std::uint64_t interval);

// One Bernoulli(failure_prob) draw per selected client, in the given order,
// followed by a uniform failure step when it fires. Clients with zero local
// steps never fail. `steps_per_client` is aligned with `selected`.
std::vector<FailureEvent> SampleFailures(
    std::span<const ClientId> selected,
    std::span<const std::uint64_t> steps_per_client, std::uint64_t round,
    double failure_prob, RngStream& rng);

struct RecoveryPoint {
  std::uint64_t resume_step = 0;
  std::vector<double> params;
  std::uint64_t rng_cursor = 0;
  bool from_checkpoint = false;
};

// Latest checkpoint for (client_id, round), or step 0 with `initial_params`
// and cursor 0 if none exists. A stored but corrupt record raises
// IntegrityError.
RecoveryPoint Recover(ClientId client_id, std::uint64_t round,
                      CheckpointStore& store,
                      std::span<const double> initial_params);

}  // namespace fedsel

#endif  // FEDSEL_FAULT_TOLERANCE_H_
