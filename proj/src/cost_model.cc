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

#include "fedsel/cost_model.h"

#include <cmath>

#include "fedsel/error.h"

namespace fedsel {

void ValidateCostModel(const CostModel& cm) {
  for (double c : {cm.base_step_cost, cm.aggregation_cost, cm.checkpoint_cost,
                   cm.recovery_cost}) {
    if (!(c >= 0.0) || !std::isfinite(c)) {
      throw ParameterError("cost model entries must be finite and >= 0");
    }
  }
}

double ClientTime(std::uint64_t steps_executed, std::uint64_t saves,
                  std::uint64_t recoveries, double capacity,
                  const CostModel& cm) {
  if (!(capacity > 0.0)) throw ParameterError("capacity must be positive");
  return static_cast<double>(steps_executed) * cm.base_step_cost / capacity +
         static_cast<double>(saves) * cm.checkpoint_cost +
         static_cast<double>(recoveries) * cm.recovery_cost;
}

}  // namespace fedsel
