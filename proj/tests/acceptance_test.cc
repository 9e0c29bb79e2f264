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

// Acceptance checks for the simulator. Prints one PASS/FAIL line per
// criterion and exits non-zero if any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fedsel/checkpoint.h"
#include "fedsel/config.h"
#include "fedsel/error.h"
#include "fedsel/experiment.h"
#include "fedsel/model.h"
#include "fedsel/privacy.h"
#include "fedsel/selection.h"

namespace fedsel {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string Fmt(const char* format, double a, double b = 0, double c = 0,
                double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof(buf), format, a, b, c, d);
  return buf;
}

ExperimentConfig BaseConfig(std::size_t rounds) {
  ExperimentConfig cfg;
  cfg.rounds = rounds;
  return cfg;
}

double Mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double SampleStd(const std::vector<double>& v) {
  const double m = Mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// 1. Clipping never exceeds the bound and leaves short vectors alone.
Outcome ClippingBound() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> dim(1, 100);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double c = 1.0;
  double worst = 0.0;
  std::size_t identity_violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    GradientVector g;
    g.values.resize(dim(rng));
    for (double& x : g.values) x = normal(rng);
    const double target = 10.0 * c * unit(rng);
    const double norm = L2Norm(g);
    if (norm > 0.0) {
      for (double& x : g.values) x *= target / norm;
    }
    const GradientVector clipped = Clip(g, c);
    worst = std::max(worst, L2Norm(clipped));
    if (L2Norm(g) <= c && clipped != g) ++identity_violations;
  }
  return {worst <= c + 1e-12 && identity_violations == 0,
          Fmt("max norm %.17g, identity violations %.0f", worst,
              static_cast<double>(identity_violations))};
}

// 2. Gaussian noise has the calibrated spread.
Outcome NoiseCalibration() {
  const double sigma = CalibrateSigma(1.0, 1e-5, 1.0);
  const double expected = std::sqrt(2.0 * std::log(1.25 / 1e-5));
  RngStream rng(202, StreamPurpose::kNoise);
  const auto draws =
      AddNoise(GradientVector{std::vector<double>(100000, 0.0)}, sigma, rng);
  const double mean = Mean(draws.values);
  const double sd = SampleStd(draws.values);
  const bool ok = std::abs(sigma - expected) < 1e-12 &&
                  std::abs(sigma - 4.8448) < 1e-4 &&
                  std::abs(sd - sigma) <= 0.02 * sigma &&
                  std::abs(mean) <= 0.05;
  return {ok, Fmt("sigma %.6f, sample sd %.6f, mean %.5f", sigma, sd, mean)};
}

// 3. Analytic gradients agree with central differences.
Outcome GradientCorrectness() {
  std::mt19937_64 rng(303);
  std::uniform_int_distribution<int> features(1, 6);
  std::uniform_int_distribution<int> batch(1, 12);
  std::uniform_real_distribution<double> param(-1.5, 1.5);
  const double h = 1e-5;
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t f = features(rng);
    const Architecture arch = trial % 2 == 0
                                  ? Architecture::Logistic(f)
                                  : Architecture::Mlp(f, 1 + trial % 5);
    GlobalModel model = InitModel(arch, trial);
    for (double& p : model.params) p = param(rng);
    const Dataset data = GenerateSynthetic(batch(rng) + 1, f, 1.5, trial);
    const auto lg = ComputeLossAndGradient(model, data.All());
    for (std::size_t i = 0; i < model.params.size(); ++i) {
      GlobalModel plus = model, minus = model;
      plus.params[i] += h;
      minus.params[i] -= h;
      const double fd = (ComputeLossAndGradient(plus, data.All()).loss -
                         ComputeLossAndGradient(minus, data.All()).loss) /
                        (2.0 * h);
      const double an = lg.grad.values[i];
      // Relative to the larger magnitude, floored at 1e-6 so coordinates whose
      // gradient is near zero are judged on absolute error.
      const double denom = std::max({1e-6, std::abs(fd), std::abs(an)});
      worst = std::max(worst, std::abs(fd - an) / denom);
    }
  }
  return {worst <= 1e-5, Fmt("max relative error %.3e", worst)};
}

double PairCountAuc(const std::vector<double>& s, const std::vector<int>& y) {
  double num = 0.0, pairs = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (y[i] != 1) continue;
    for (std::size_t j = 0; j < s.size(); ++j) {
      if (y[j] != 0) continue;
      pairs += 1.0;
      num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
    }
  }
  return num / pairs;
}

// 4. Rank AUC equals the pair-counting definition.
Outcome AucOracle() {
  std::mt19937_64 rng(404);
  std::uniform_int_distribution<int> size(2, 50);
  std::uniform_int_distribution<int> grid(0, 10);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    std::vector<double> scores(n);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) {
      scores[i] = trial % 2 ? grid(rng) / 10.0
                            : std::uniform_real_distribution<double>()(rng);
      labels[i] = static_cast<int>(rng() & 1);
    }
    labels[0] = 0;
    labels[1] = 1;
    if (AucRoc(scores, labels) != PairCountAuc(scores, labels)) ++mismatches;
  }
  return {mismatches == 0, Fmt("%.0f mismatches in 200 instances", mismatches)};
}

// 5. Top-K selection equals a full sort.
Outcome SelectionOracle() {
  std::mt19937_64 rng(505);
  int mismatches = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 40;
    std::vector<UtilityScore> scores;
    std::vector<ClientId> available;
    for (ClientId id = 0; id < n; ++id) {
      scores.push_back({id, static_cast<double>(rng() % 7) / 6.0});
      if (rng() % 4 != 0) available.push_back(id);
    }
    std::shuffle(available.begin(), available.end(), rng);
    const std::size_t k = 1 + rng() % (n + 3);
    std::vector<UtilityScore> sorted;
    for (ClientId id : available) sorted.push_back(scores[id]);
    std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
      return a.score != b.score ? a.score > b.score : a.client_id < b.client_id;
    });
    std::vector<ClientId> expected;
    for (std::size_t i = 0; i < std::min(k, sorted.size()); ++i) {
      expected.push_back(sorted[i].client_id);
    }
    if (SelectTopK(scores, available, k) != expected) ++mismatches;
  }
  return {mismatches == 0, Fmt("%.0f mismatches in 200 instances", mismatches)};
}

// 6. Recovery reproduces the failure-free model bit for bit.
Outcome RecoveryTransparency() {
  int identical = 0, slower = 0, total_failures = 0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    ExperimentConfig cfg = BaseConfig(10);
    cfg.n_clients = 8;
    cfg.master_seed = seed;
    cfg.fault_tolerance.checkpoint_interval_steps = 5;
    cfg.training.local_epochs = 2;
    const auto clean = RunExperiment(cfg);
    cfg.fault_tolerance.failure_prob_per_round = 0.3;
    const auto faulty = RunExperiment(cfg);
    identical += faulty.final_model.params == clean.final_model.params;
    slower += faulty.summary.total_sim_time_s > clean.summary.total_sim_time_s;
    total_failures += static_cast<int>(faulty.summary.failures);
  }
  return {identical == 20 && slower == 20,
          Fmt("%.0f/20 bit-identical, %.0f/20 slower, %.0f failures injected",
              identical, slower, total_failures)};
}

std::string Slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int RunCli(const std::string& args) {
  const std::string cmd =
      std::string(FEDSEL_BINARY) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

// 7. Identical configs give identical bytes, regardless of thread count.
Outcome EndToEndDeterminism() {
  const fs::path dir = fs::temp_directory_path() / "fedsel_acceptance_det";
  fs::remove_all(dir);
  fs::create_directories(dir);
  ExperimentConfig cfg = BaseConfig(12);
  cfg.partition = PartitionStrategy::kDirichlet;
  cfg.capacity = {0.2, 2.0};
  cfg.fault_tolerance.failure_prob_per_round = 0.2;
  cfg.master_seed = 77;
  cfg.output_dir = (dir / "a").string();
  std::ofstream(dir / "config.json") << ConfigToJson(cfg).dump(2);
  const std::string config = (dir / "config.json").string();
  int rc = RunCli("run " + config);
  const std::string first = Slurp(dir / "a" / "reports.jsonl");
  rc |= RunCli("run " + config + " --set output_dir=" + (dir / "b").string());
  rc |= RunCli("run " + config + " --set threads=4 --set output_dir=" +
               (dir / "c").string());
  const bool repeat = !first.empty() && first == Slurp(dir / "b" / "reports.jsonl");
  const bool threads = first == Slurp(dir / "c" / "reports.jsonl");
  return {rc == 0 && repeat && threads,
          std::string("repeat ") + (repeat ? "identical" : "DIFFERENT") +
              ", threads=4 " + (threads ? "identical" : "DIFFERENT") +
              ", exit codes " + (rc == 0 ? "ok" : "nonzero")};
}

struct PointStats {
  std::vector<double> accuracy;
  std::vector<double> time;
};

PointStats RunSeeds(ExperimentConfig cfg, int seeds,
                    const std::function<void(const ExperimentResult&)>& each =
                        nullptr) {
  PointStats stats;
  for (int s = 0; s < seeds; ++s) {
    cfg.master_seed = static_cast<std::uint64_t>(s);
    const auto result = RunExperiment(cfg);
    stats.accuracy.push_back(result.summary.final_eval.accuracy);
    stats.time.push_back(result.summary.total_sim_time_s);
    if (each) each(result);
  }
  return stats;
}

// 8. Accuracy improves as the per-round privacy budget loosens.
Outcome EpsilonTrend() {
  const std::vector<double> epsilons = {1.0, 10.0, 100.0};
  std::vector<double> means, ses;
  for (double eps : epsilons) {
    ExperimentConfig cfg = BaseConfig(30);
    cfg.partition = PartitionStrategy::kDirichlet;
    cfg.dirichlet_alpha = 0.5;
    cfg.n_clients = 10;
    cfg.privacy.enabled = true;
    cfg.privacy.epsilon_round = eps;
    cfg.fault_tolerance.enabled = false;
    const auto stats = RunSeeds(cfg, 5);
    means.push_back(Mean(stats.accuracy));
    ses.push_back(SampleStd(stats.accuracy) / std::sqrt(5.0));
  }
  bool monotone = true;
  for (std::size_t i = 0; i + 1 < means.size(); ++i) {
    const double pooled = std::sqrt(ses[i] * ses[i] + ses[i + 1] * ses[i + 1]);
    monotone &= means[i + 1] >= means[i] - pooled;
  }
  const double gap = means[2] - means[0];
  return {gap >= 0.02 && monotone,
          Fmt("mean accuracy eps=1 %.4f, eps=10 %.4f, eps=100 %.4f (gap %.4f)",
              means[0], means[1], means[2], gap)};
}

// 9. Fault tolerance costs a bounded amount of time and no accuracy.
Outcome FaultToleranceOverhead() {
  ExperimentConfig cfg = BaseConfig(20);
  cfg.n_clients = 10;
  cfg.training.local_epochs = 2;  // 160-sample shards: 20 local steps
  cfg.fault_tolerance.checkpoint_interval_steps = 5;
  cfg.fault_tolerance.enabled = false;
  cfg.fault_tolerance.failure_prob_per_round = 0.0;
  const auto baseline = RunSeeds(cfg, 5);
  cfg.fault_tolerance.enabled = true;
  cfg.fault_tolerance.failure_prob_per_round = 0.1;
  const auto with_ft = RunSeeds(cfg, 5);
  const double overhead = Mean(with_ft.time) / Mean(baseline.time) - 1.0;
  const double acc_drop = Mean(baseline.accuracy) - Mean(with_ft.accuracy);
  return {overhead >= 0.01 && overhead <= 0.25 && acc_drop <= 0.03,
          Fmt("time overhead %.2f%%, accuracy %.4f vs failure-free %.4f",
              100.0 * overhead, Mean(with_ft.accuracy),
              Mean(baseline.accuracy))};
}

// 10. Utility-driven selection matches random accuracy in less time.
Outcome SelectionBenefit() {
  ExperimentConfig cfg = BaseConfig(30);
  cfg.n_clients = 20;
  cfg.partition = PartitionStrategy::kDirichlet;
  cfg.dirichlet_alpha = 0.1;
  cfg.capacity = {0.2, 2.0};
  cfg.privacy.enabled = false;
  cfg.fault_tolerance.enabled = false;
  cfg.selection.k_init = 8;
  cfg.selection.k_min = 2;
  cfg.selection.k_max = 10;
  cfg.selection.w_data = 0.2;
  cfg.selection.w_compute = 0.8;
  cfg.selection.time_budget_per_round = 0.2;

  std::size_t overruns = 0;
  cfg.strategy = Strategy::kProposed;
  const auto proposed = RunSeeds(cfg, 5, [&](const ExperimentResult& r) {
    for (const auto& rep : r.reports) {
      overruns += rep.sim_time_s > cfg.selection.time_budget_per_round;
    }
  });
  cfg.strategy = Strategy::kRandom;
  const auto random = RunSeeds(cfg, 5);
  const double acc_p = Mean(proposed.accuracy), acc_r = Mean(random.accuracy);
  const double t_p = Mean(proposed.time), t_r = Mean(random.time);
  return {overruns > 0 && acc_p >= acc_r - 0.01 && t_p < t_r,
          Fmt("proposed acc %.4f time %.3f; random acc %.4f time %.3f", acc_p,
              t_p, acc_r, t_r) +
              ", budget overruns " + std::to_string(overruns)};
}

// 11. The ledger composes linearly and is inert without privacy.
Outcome BudgetAccounting() {
  ExperimentConfig cfg = BaseConfig(7);
  cfg.privacy.enabled = true;
  cfg.privacy.epsilon_round = 0.3;
  cfg.p_avail = 0.5;
  const auto on = RunExperiment(cfg);
  const bool linear = on.summary.ledger.rounds_completed == 7 &&
                      on.summary.ledger.epsilon_total == 7 * 0.3;
  cfg.privacy.enabled = false;
  const auto off = RunExperiment(cfg);
  const bool inert = off.summary.ledger == BudgetLedger{};
  const auto params = MakePrivacyParams(false, 0.3, 1e-5, 1.0);
  RngStream rng(11, StreamPurpose::kNoise);
  const GradientVector g{{0.5, -2.0, 7.0}};
  const bool identity = params.sigma == 0.0 && AddNoise(g, params.sigma, rng) == g;
  return {linear && inert && identity,
          Fmt("eps_total %.17g for 7 x 0.3; disabled ledger eps %.1f", 
              on.summary.ledger.epsilon_total,
              off.summary.ledger.epsilon_total) +
              (identity ? ", sigma=0 is identity" : ", sigma=0 NOT identity")};
}

// 12. Checkpoints round-trip exactly and corruption is caught.
Outcome CheckpointFormat() {
  const fs::path dir = fs::temp_directory_path() / "fedsel_acceptance_ckpt";
  fs::remove_all(dir);
  FileCheckpointStore store(dir);
  std::mt19937_64 rng(1212);
  std::normal_distribution<double> normal(0.0, 1e6);
  int roundtrips = 0;
  for (int i = 0; i < 50; ++i) {
    CheckpointRecord r;
    r.client_id = static_cast<ClientId>(rng() % 1000);
    r.round = rng() % 100000;
    r.step = rng();
    r.rng_cursor = rng();
    r.model_params.resize(rng() % 64);
    for (double& p : r.model_params) p = normal(rng);
    store.Save(r);
    const auto back = store.Load(r.client_id, r.round);
    roundtrips += back.has_value() && *back == r;
  }
  CheckpointRecord r;
  r.client_id = 5;
  r.round = 9;
  r.model_params = {1.0, 2.0};
  store.Save(r);
  const fs::path path = store.PathFor(5, 9);
  {
    std::fstream f(path, std::ios::in | std::ios::out | std::ios::binary);
    f.seekp(-1, std::ios::end);
    char c = 0;
    f.read(&c, 1);
    f.seekp(-1, std::ios::end);
    c = static_cast<char>(c ^ 0x5a);
    f.write(&c, 1);
  }
  bool detected = false;
  try {
    store.Load(5, 9);
  } catch (const IntegrityError&) {
    detected = true;
  }
  return {roundtrips == 50 && detected,
          Fmt("%.0f/50 exact round-trips", roundtrips) +
              (detected ? ", corrupted CRC raised IntegrityError"
                        : ", corrupted CRC NOT detected")};
}

}  // namespace
}  // namespace fedsel

int main() {
  using fedsel::Outcome;
  struct Criterion {
    const char* name;
    Outcome (*check)();
  };
  const Criterion criteria[] = {
      {"clipping bound", fedsel::ClippingBound},
      {"noise calibration", fedsel::NoiseCalibration},
      {"gradient correctness", fedsel::GradientCorrectness},
      {"AUC oracle equivalence", fedsel::AucOracle},
      {"selection oracle", fedsel::SelectionOracle},
      {"recovery transparency", fedsel::RecoveryTransparency},
      {"end-to-end determinism", fedsel::EndToEndDeterminism},
      {"epsilon trend", fedsel::EpsilonTrend},
      {"fault-tolerance overhead", fedsel::FaultToleranceOverhead},
      {"selection benefit", fedsel::SelectionBenefit},
      {"budget accounting", fedsel::BudgetAccounting},
      {"checkpoint format", fedsel::CheckpointFormat},
  };
  int failed = 0;
  int index = 0;
  for (const auto& c : criteria) {
    ++index;
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = c.check();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(
                            std::chrono::steady_clock::now() - start)
                            .count();
    std::printf("%s %2d %-26s %s [%.2fs]\n", outcome.pass ? "PASS" : "FAIL",
                index, c.name, outcome.detail.c_str(), secs);
    std::fflush(stdout);
    failed += !outcome.pass;
  }
  std::printf("%d/%d criteria passed\n", index - failed, index);
  return failed == 0 ? 0 : 1;
}
