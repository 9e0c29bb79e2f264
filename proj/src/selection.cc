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

#include "fedsel/selection.h"

#include <algorithm>
#include <cmath>
#include <unordered_map>
#include <utility>

#include "fedsel/error.h"

namespace fedsel {

void ValidateSelectionConfig(const SelectionConfig& cfg) {
  if (cfg.k_min < 1) throw ParameterError("k_min must be >= 1");
  if (cfg.k_init < cfg.k_min || cfg.k_init > cfg.k_max) {
    throw ParameterError("need k_min <= k_init <= k_max");
  }
  if (cfg.w_data < 0.0 || cfg.w_compute < 0.0) {
    throw ParameterError("utility weights must be non-negative");
  }
  if (std::abs(cfg.w_data + cfg.w_compute - 1.0) > 1e-9) {
    throw ParameterError("utility weights must sum to 1");
  }
  if (!(cfg.time_budget_per_round > 0.0)) {
    throw ParameterError("time_budget_per_round must be positive");
  }
}

RegistryMaxima ComputeMaxima(std::span<const ClientStats> registry) {
  RegistryMaxima m{0, 0.0};
  for (const auto& c : registry) {
    m.max_samples = std::max(m.max_samples, c.n_samples);
    m.max_capacity = std::max(m.max_capacity, c.compute_capacity);
  }
  if (m.max_samples == 0 || !(m.max_capacity > 0.0)) {
    throw ParameterError("registry maxima must be positive");
  }
  return m;
}

UtilityScore ComputeUtility(const ClientStats& stats,
                            const RegistryMaxima& maxima,
                            const SelectionConfig& cfg) {
  const double data = static_cast<double>(stats.n_samples) /
                      static_cast<double>(maxima.max_samples);
  const double compute = stats.compute_capacity / maxima.max_capacity;
  double score = cfg.w_data * data + cfg.w_compute * compute;
  if (!std::isfinite(score)) score = 0.0;
  return {stats.client_id, std::clamp(score, 0.0, 1.0)};
}

std::vector<ClientId> SelectTopK(std::span<const UtilityScore> scores,
                                 std::span<const ClientId> available,
                                 std::size_t k) {
  if (k < 1) throw ParameterError("k must be >= 1");
  std::unordered_map<ClientId, double> by_id;
  for (const auto& s : scores) by_id[s.client_id] = s.score;

  std::vector<std::pair<double, ClientId>> ranked;
  ranked.reserve(available.size());
  for (ClientId id : available) {
    const auto it = by_id.find(id);
    ranked.emplace_back(it == by_id.end() ? 0.0 : it->second, id);
  }
  std::sort(ranked.begin(), ranked.end());
  ranked.erase(std::unique(ranked.begin(), ranked.end()), ranked.end());

  const std::size_t take = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + take, ranked.end(),
                    [](const auto& a, const auto& b) {
                      if (a.first != b.first) return a.first > b.first;
                      return a.second < b.second;
                    });
  std::vector<ClientId> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(ranked[i].second);
  return out;
}

std::size_t AdaptK(std::size_t k_current, double last_round_time,
                   double accuracy_gain, const SelectionConfig& cfg) {
  std::size_t next = k_current;
  if (last_round_time > cfg.time_budget_per_round) {
    // ceil(0.8 k), but at least one fewer: ceil(0.8 k) == k for k <= 4.
    const std::size_t shrunk = (4 * k_current + 4) / 5;
    next = std::max(cfg.k_min,
                    std::min(shrunk, k_current > 0 ? k_current - 1 : 0));
  } else if (accuracy_gain < cfg.min_accuracy_gain) {
    next = std::min(cfg.k_max, k_current + 1);
  }
  return std::clamp(next, cfg.k_min, cfg.k_max);
}

}  // namespace fedsel
