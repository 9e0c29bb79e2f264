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

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fedsel/commands.h"

int main(int argc, char** argv) {
  CLI::App app{"fedsel: federated client-selection simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::string> overrides;
  auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
  run->add_option("config", config_path, "Experiment config (JSON)")
      ->required();
  run->add_option("--set", overrides, "Override a config key: key=value")
      ->take_all();

  std::string sweep_path;
  std::size_t jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("sweep", sweep_path, "Sweep spec (JSON)")->required();
  sweep->add_option("--jobs", jobs, "Concurrent child runs");

  std::string report_dir;
  auto* report =
      app.add_subcommand("report", "Render a Markdown comparison table");
  report->add_option("dir", report_dir, "Run, runs or sweep directory")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : fedsel::kExitConfigError;
  }

  if (*run) return fedsel::CmdRun(config_path, overrides, std::cerr);
  if (*sweep) return fedsel::CmdSweep(sweep_path, jobs, std::cerr);
  return fedsel::CmdReport(report_dir, std::cout, std::cerr);
}
