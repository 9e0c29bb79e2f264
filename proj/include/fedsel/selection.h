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

#ifndef FEDSEL_SELECTION_H_
#define FEDSEL_SELECTION_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fedsel {

using ClientId = std::uint32_t;

struct ClientStats {
  ClientId client_id = 0;
  std::size_t n_samples = 1;
  double compute_capacity = 1.0;  // local steps per simulated second at cost 1
  std::uint64_t last_seen_round = 0;
  // Previous local loss minus current. Carried for staleness-aware scoring;
  // the default utility ignores it.
  double recent_loss_delta = 0.0;
};

struct RegistryMaxima {
  std::size_t max_samples = 1;
  double max_capacity = 1.0;
};

struct UtilityScore {
  ClientId client_id = 0;
  double score = 0.0;

  bool operator==(const UtilityScore&) const = default;
};

struct SelectionConfig {
  std::size_t k_init = 5;
  std::size_t k_min = 1;
  std::size_t k_max = 10;
  double w_data = 0.5;
  double w_compute = 0.5;
  double time_budget_per_round = 1e9;  // simulated seconds
  double min_accuracy_gain = 0.0;

  bool operator==(const SelectionConfig&) const = default;
};

// Throws ParameterError unless 1 <= k_min <= k_init <= k_max and the weights
// are non-negative and sum to 1.
void ValidateSelectionConfig(const SelectionConfig& cfg);

RegistryMaxima ComputeMaxima(std::span<const ClientStats> registry);

// w_data * n / max_n + w_compute * capacity / max_capacity, clamped to [0, 1].
UtilityScore ComputeUtility(const ClientStats& stats,
                            const RegistryMaxima& maxima,
                            const SelectionConfig& cfg);

// The min(k, |available|) available clients with the highest scores, ordered
// by (score desc, id asc). Clients without a score rank as 0. An empty result
// means there is nothing to run this round.
std::vector<ClientId> SelectTopK(std::span<const UtilityScore> scores,
                                 std::span<const ClientId> available,
                                 std::size_t k);

// Shrinks K to ceil(0.8 K), and by at least one, when the last round overran
// the time budget;
// otherwise grows it by one when accuracy stalled. Result is within
// [k_min, k_max].
std::size_t AdaptK(std::size_t k_current, double last_round_time,
                   double accuracy_gain, const SelectionConfig& cfg);

}  // namespace fedsel

#endif  // FEDSEL_SELECTION_H_
