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

#ifndef FEDSEL_COMMANDS_H_
#define FEDSEL_COMMANDS_H_

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace fedsel {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitRuntimeError = 3;

inline constexpr char kSweepCsvHeader[] =
    "axis_value,seed,final_accuracy,final_auc,sim_time_s,eps_total";

// `fedsel run`: writes reports.jsonl, summary.json and checkpoints under the
// configured output directory. FEDSEL_SEED, when set, replaces master_seed.
int CmdRun(const std::filesystem::path& config_path,
           const std::vector<std::string>& overrides, std::ostream& diag);

// `fedsel sweep`: one run per (value, seed) under
// <output_dir>/<axis>_<value>/seed_<seed>, then sweep.csv ordered by
// (axis_value, seed). `jobs_override` > 0 replaces the spec's job count.
int CmdSweep(const std::filesystem::path& sweep_path, std::size_t jobs_override,
             std::ostream& diag);

// `fedsel report`: renders report.md (also printed to `out`) for a run
// directory, a directory of runs, or a sweep directory.
int CmdReport(const std::filesystem::path& dir, std::ostream& out,
              std::ostream& diag);

}  // namespace fedsel

#endif  // FEDSEL_COMMANDS_H_
