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

#include "fedsel/orchestrator.h"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <random>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>

#include "fedsel/error.h"
#include "fedsel/rng.h"

namespace fedsel {

ClientStats ClientRecord::Stats() const {
  ClientStats s;
  s.client_id = id;
  s.n_samples = shard.size();
  s.compute_capacity = compute_capacity;
  s.last_seen_round = last_seen_round;
  s.recent_loss_delta = recent_loss_delta;
  return s;
}

std::uint64_t LocalStepCount(std::size_t n_samples, const TrainingConfig& cfg) {
  if (cfg.batch_size == 0) throw ParameterError("batch_size must be >= 1");
  const std::uint64_t per_epoch =
      (n_samples + cfg.batch_size - 1) / cfg.batch_size;
  return per_epoch * cfg.local_epochs;
}

ClientUpdate LocalTrain(const ClientRecord& client, const GlobalModel& global,
                        std::uint64_t round, const OrchestratorConfig& cfg,
                        const std::optional<FailureEvent>& failure,
                        CheckpointStore& store) {
  const Dataset& shard = client.shard;
  if (shard.size() == 0) throw ShapeError("client shard is empty");
  if (shard.n_features != global.arch.n_features) {
    throw ShapeError("client " + std::to_string(client.id) + " has " +
                     std::to_string(shard.n_features) +
                     " features, model expects " +
                     std::to_string(global.arch.n_features));
  }

  const TrainingConfig& tc = cfg.training;
  const FaultToleranceConfig& ft = cfg.fault_tolerance;
  const std::uint64_t total = LocalStepCount(shard.size(), tc);
  const std::uint64_t steps_per_epoch = total / std::max<std::size_t>(1, tc.local_epochs);

  ClientUpdate out;
  out.client_id = client.id;
  out.n_samples = shard.size();

  RngStream noise_rng(cfg.master_seed, StreamPurpose::kNoise, client.id, round);
  if (ft.enabled) store.Erase(client.id, round);

  GlobalModel local = global;
  std::uint64_t step = 0;
  while (step < total) {
    const std::uint64_t in_epoch = step % steps_per_epoch;
    const std::size_t begin = in_epoch * tc.batch_size;
    const std::size_t end = std::min(shard.size(), begin + tc.batch_size);
    const auto lg = ComputeLossAndGradient(local, shard.Slice(begin, end));
    for (std::size_t i = 0; i < local.params.size(); ++i) {
      local.params[i] -= tc.lr * lg.grad.values[i];
    }
    ++out.steps_executed;

    if (failure && !out.failed && step == failure->fail_at_step) {
      out.failed = true;
      if (!ft.enabled) {
        out.dropped = true;
        out.local_time = ClientTime(out.steps_executed, out.saves, 0,
                                    client.compute_capacity, cfg.cost);
        out.noisy_update.values.assign(global.params.size(), 0.0);
        return out;
      }
      RecoveryPoint point;
      try {
        point = Recover(client.id, round, store, global.params);
      } catch (const IntegrityError&) {
        point = RecoveryPoint{0, global.params, 0, false};
      }
      local.params = std::move(point.params);
      noise_rng.Restore(point.rng_cursor);
      step = point.resume_step;
      ++out.recoveries;
      out.recovered = true;
      continue;
    }

    ++step;
    // A save after the final step would never be read back.
    if (ft.enabled && step < total &&
        ShouldCheckpoint(step, ft.checkpoint_interval_steps)) {
      CheckpointRecord record;
      record.client_id = client.id;
      record.round = round;
      record.step = step;
      record.model_params = local.params;
      record.rng_cursor = noise_rng.cursor();
      store.Save(record);
      ++out.saves;
    }
  }

  GradientVector update;
  update.values.resize(global.params.size());
  for (std::size_t i = 0; i < update.values.size(); ++i) {
    update.values[i] = global.params[i] - local.params[i];
  }
  if (cfg.privacy.enabled) {
    update = Clip(update, cfg.privacy.clip_norm);
    update = AddNoise(update, cfg.privacy.sigma, noise_rng);
  }
  out.noisy_update = std::move(update);
  out.local_time = ClientTime(out.steps_executed, out.saves, out.recoveries,
                              client.compute_capacity, cfg.cost);
  return out;
}

std::optional<GradientVector> Aggregate(std::span<const ClientUpdate> updates) {
  if (updates.empty()) return std::nullopt;
  std::vector<const ClientUpdate*> ordered;
  ordered.reserve(updates.size());
  for (const auto& u : updates) ordered.push_back(&u);
  std::sort(ordered.begin(), ordered.end(),
            [](const ClientUpdate* a, const ClientUpdate* b) {
              return a->client_id < b->client_id;
            });

  const std::size_t dim = ordered.front()->noisy_update.size();
  GradientVector sum;
  sum.values.assign(dim, 0.0);
  double total_weight = 0.0;
  for (const ClientUpdate* u : ordered) {
    if (u->noisy_update.size() != dim) {
      throw ShapeError("client updates differ in length");
    }
    const double w = static_cast<double>(u->n_samples);
    for (std::size_t i = 0; i < dim; ++i) {
      sum.values[i] += w * u->noisy_update.values[i];
    }
    total_weight += w;
  }
  if (!(total_weight > 0.0)) {
    throw ParameterError("aggregate needs a positive total sample count");
  }
  for (double& v : sum.values) v /= total_weight;
  return sum;
}

Orchestrator::Orchestrator(OrchestratorConfig cfg,
                           std::vector<ClientRecord> registry,
                           Dataset test_set, GlobalModel initial_model,
                           std::unique_ptr<CheckpointStore> store)
    : cfg_(std::move(cfg)),
      registry_(std::move(registry)),
      test_set_(std::move(test_set)),
      model_(std::move(initial_model)),
      store_(std::move(store)) {
  if (registry_.empty()) throw ParameterError("client registry is empty");
  if (!store_) store_ = std::make_unique<MemoryCheckpointStore>();
  ValidateSelectionConfig(cfg_.selection);
  ValidateFaultToleranceConfig(cfg_.fault_tolerance);
  ValidateCostModel(cfg_.cost);
  if (!(cfg_.p_avail >= 0.0 && cfg_.p_avail <= 1.0)) {
    throw ParameterError("p_avail must lie in [0, 1]");
  }
  std::sort(registry_.begin(), registry_.end(),
            [](const ClientRecord& a, const ClientRecord& b) {
              return a.id < b.id;
            });
  std::vector<ClientStats> stats;
  for (const auto& c : registry_) stats.push_back(c.Stats());
  maxima_ = ComputeMaxima(stats);

  state_.k_current = cfg_.selection.k_init;
  initial_eval_ = Evaluate(model_, test_set_);
  last_accuracy_ = initial_eval_.accuracy;
}

std::vector<ClientId> Orchestrator::SampleAvailability(
    std::uint64_t round) const {
  RngStream rng(cfg_.master_seed, StreamPurpose::kAvailability, 0, round);
  std::bernoulli_distribution up(cfg_.p_avail);
  std::vector<ClientId> available;
  for (const auto& c : registry_) {
    if (up(rng)) available.push_back(c.id);
  }
  return available;
}

std::vector<ClientId> Orchestrator::Select(std::span<const ClientId> available,
                                           std::uint64_t round) const {
  switch (cfg_.strategy) {
    case Strategy::kFull:
      return {available.begin(), available.end()};
    case Strategy::kRandom: {
      RngStream rng(cfg_.master_seed, StreamPurpose::kSelection, 0, round);
      std::vector<ClientId> pool(available.begin(), available.end());
      std::shuffle(pool.begin(), pool.end(), rng);
      pool.resize(std::min(pool.size(), cfg_.selection.k_init));
      std::sort(pool.begin(), pool.end());
      return pool;
    }
    case Strategy::kProposed:
    case Strategy::kStaticK: {
      std::vector<UtilityScore> scores;
      scores.reserve(available.size());
      std::unordered_map<ClientId, const ClientRecord*> by_id;
      for (const auto& c : registry_) by_id[c.id] = &c;
      for (ClientId id : available) {
        scores.push_back(
            ComputeUtility(by_id.at(id)->Stats(), maxima_, cfg_.selection));
      }
      const std::size_t k = cfg_.strategy == Strategy::kProposed
                                ? state_.k_current
                                : cfg_.selection.k_init;
      return SelectTopK(scores, available, k);
    }
  }
  return {};
}

std::vector<ClientUpdate> Orchestrator::TrainSelected(
    std::span<const ClientId> selected,
    std::span<const std::optional<FailureEvent>> failures,
    std::uint64_t round) {
  std::unordered_map<ClientId, const ClientRecord*> by_id;
  for (const auto& c : registry_) by_id[c.id] = &c;

  std::vector<ClientUpdate> updates(selected.size());
  auto work = [&](std::size_t i) {
    updates[i] = LocalTrain(*by_id.at(selected[i]), model_, round, cfg_,
                            failures[i], *store_);
  };

  const std::size_t workers = std::min(cfg_.threads, selected.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < selected.size(); ++i) work(i);
    return updates;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < selected.size(); i = next++) work(i);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return updates;
}

RoundReport Orchestrator::RunRound() {
  const auto wall_start = std::chrono::steady_clock::now();
  const std::uint64_t round = state_.round + 1;

  RoundReport report;
  report.round = round;
  state_.round = round;
  state_.available = SampleAvailability(round);

  if (state_.available.empty()) {
    state_.selected.clear();
    report.skipped = true;
    report.eval = Evaluate(model_, test_set_);
    // Skipped rounds are still charged so the ledger stays t * epsilon.
    ledger_ = RecordRound(ledger_, cfg_.privacy);
    report.ledger = ledger_;
    report.k_next = state_.k_current;
    return report;
  }

  state_.selected = Select(state_.available, round);
  report.selected = state_.selected;

  std::vector<std::uint64_t> steps;
  std::unordered_map<ClientId, const ClientRecord*> by_id;
  for (const auto& c : registry_) by_id[c.id] = &c;
  for (ClientId id : state_.selected) {
    steps.push_back(LocalStepCount(by_id.at(id)->shard.size(), cfg_.training));
  }
  RngStream failure_rng(cfg_.master_seed, StreamPurpose::kFailure, 0, round);
  const auto events =
      SampleFailures(state_.selected, steps, round,
                     cfg_.fault_tolerance.failure_prob_per_round, failure_rng);
  std::vector<std::optional<FailureEvent>> per_client(state_.selected.size());
  for (const auto& e : events) {
    const auto it =
        std::find(state_.selected.begin(), state_.selected.end(), e.client_id);
    per_client[static_cast<std::size_t>(it - state_.selected.begin())] = e;
  }

  std::vector<ClientUpdate> updates =
      TrainSelected(state_.selected, per_client, round);

  double slowest = 0.0;
  std::vector<ClientUpdate> kept;
  for (auto& u : updates) {
    slowest = std::max(slowest, u.local_time);
    report.failures += u.failed;
    report.recoveries += u.recoveries;
    if (!u.dropped) kept.push_back(std::move(u));
  }
  for (auto& c : registry_) {
    if (std::find(state_.selected.begin(), state_.selected.end(), c.id) !=
        state_.selected.end()) {
      c.last_seen_round = round;
    }
  }

  if (auto aggregate = Aggregate(kept)) {
    model_ = ApplyUpdate(model_, *aggregate, cfg_.training.server_lr);
    ++model_.version;
  }
  report.sim_time_s = slowest + cfg_.cost.aggregation_cost;
  report.eval = Evaluate(model_, test_set_);
  ledger_ = RecordRound(ledger_, cfg_.privacy);
  report.ledger = ledger_;

  if (cfg_.strategy == Strategy::kProposed) {
    state_.k_current =
        AdaptK(state_.k_current, report.sim_time_s,
               report.eval.accuracy - last_accuracy_, cfg_.selection);
  }
  last_accuracy_ = report.eval.accuracy;
  report.k_next = state_.k_current;

  if (cfg_.record_wall_clock) {
    report.wall_time_s = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - wall_start)
                             .count();
  }
  return report;
}

}  // namespace fedsel
