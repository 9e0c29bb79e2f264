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

#ifndef FEDSEL_COST_MODEL_H_
#define FEDSEL_COST_MODEL_H_

#include <cstdint>

namespace fedsel {

// Linear simulated-time model. All costs are in simulated seconds.
struct CostModel {
  double base_step_cost = 0.01;  // one local SGD step at capacity 1.0
  double aggregation_cost = 0.05;
  double checkpoint_cost = 0.005;
  double recovery_cost = 0.02;

  bool operator==(const CostModel&) const = default;
};

// Throws ParameterError if any cost is negative or non-finite.
void ValidateCostModel(const CostModel& cm);

// steps * base_step_cost / capacity + saves * checkpoint_cost
//   + recoveries * recovery_cost.
// `steps_executed` includes replayed steps.
double ClientTime(std::uint64_t steps_executed, std::uint64_t saves,
                  std::uint64_t recoveries, double capacity,
                  const CostModel& cm);

}  // namespace fedsel

#endif  // FEDSEL_COST_MODEL_H_
