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

#include "fedsel/commands.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "fedsel/config.h"
#include "fedsel/error.h"
#include "fedsel/experiment.h"
#include "json.hpp"

namespace fedsel {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error("corrupt JSON in " + path.string() + ": " + e.what());
  }
}

void WriteTextFile(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  out << text;
  if (!out) throw Error("cannot write " + path.string());
}

// Runs one experiment into `dir`: reports.jsonl, summary.json, ckpt/.
ExperimentSummary RunIntoDirectory(const ExperimentConfig& cfg,
                                   const fs::path& dir) {
  fs::create_directories(dir);
  std::ofstream reports(dir / "reports.jsonl", std::ios::trunc);
  if (!reports) throw Error("cannot write " + (dir / "reports.jsonl").string());
  RunOptions options;
  options.checkpoint_dir = dir;
  options.on_round = [&](const RoundReport& r) {
    reports << RoundReportToJsonLine(r) << '\n';
  };
  const ExperimentResult result = RunExperiment(cfg, options);
  reports.close();
  if (!reports) throw Error("failed writing reports.jsonl");
  WriteTextFile(dir / "summary.json",
                SummaryToJson(result.summary, cfg).dump(2) + "\n");
  return result.summary;
}

std::string FormatNumber(double v) { return json(v).dump(); }

std::string Fixed(double v, int digits) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(digits) << v;
  return os.str();
}

struct MetricRow {
  std::string label;
  std::vector<double> accuracy;
  std::vector<double> auc;
  std::vector<double> time;
};

std::pair<double, double> MeanStd(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  const double sd =
      xs.size() > 1 ? std::sqrt(var / static_cast<double>(xs.size() - 1)) : 0.0;
  return {mean, sd};
}

std::string Cell(const std::vector<double>& xs, double scale, int digits) {
  const auto [mean, sd] = MeanStd(xs);
  if (xs.size() == 1) return Fixed(mean * scale, digits);
  return Fixed(mean * scale, digits) + " ± " + Fixed(sd * scale, digits);
}

std::string RenderTable(const std::string& first_column,
                        const std::vector<MetricRow>& rows) {
  std::ostringstream os;
  os << "| " << first_column << " | Accuracy (%) | AUC-ROC | sim time (s) |\n";
  os << "|---|---|---|---|\n";
  for (const auto& r : rows) {
    os << "| " << r.label << " | " << Cell(r.accuracy, 100.0, 1) << " | "
       << Cell(r.auc, 1.0, 3) << " | " << Cell(r.time, 1.0, 2) << " |\n";
  }
  return os.str();
}

std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

double ParseCell(const std::string& text, const std::string& where) {
  char* end = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw Error("corrupt sweep.csv at " + where + ": '" + text + "'");
  }
  return v;
}

std::string SweepReport(const fs::path& dir) {
  std::string axis = "axis value";
  if (fs::exists(dir / "sweep.json")) {
    const json meta = ReadJsonFile(dir / "sweep.json");
    if (meta.contains("axis") && meta["axis"].is_string()) {
      axis = meta["axis"].get<std::string>();
    }
  }
  std::ifstream in(dir / "sweep.csv");
  std::string line;
  if (!std::getline(in, line) || line != kSweepCsvHeader) {
    throw Error("sweep.csv has an unexpected header");
  }
  std::vector<std::pair<double, MetricRow>> groups;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto cells = SplitCsv(line);
    const std::string where = "line " + std::to_string(line_no);
    if (cells.size() != 6) throw Error("corrupt sweep.csv at " + where);
    const double value = ParseCell(cells[0], where);
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto& g) { return g.first == value; });
    if (it == groups.end()) {
      groups.push_back({value, MetricRow{cells[0], {}, {}, {}}});
      it = groups.end() - 1;
    }
    it->second.accuracy.push_back(ParseCell(cells[2], where));
    it->second.auc.push_back(ParseCell(cells[3], where));
    it->second.time.push_back(ParseCell(cells[4], where));
  }
  if (groups.empty()) throw Error("sweep.csv has no rows");
  std::sort(groups.begin(), groups.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<MetricRow> rows;
  for (auto& g : groups) rows.push_back(std::move(g.second));
  return RenderTable(axis, rows);
}

MetricRow RowFromSummary(const json& summary, std::string label) {
  MetricRow row;
  row.label = std::move(label);
  try {
    row.accuracy.push_back(summary.at("final_accuracy").get<double>());
    row.auc.push_back(summary.at("final_auc").get<double>());
    row.time.push_back(summary.at("total_sim_time_s").get<double>());
  } catch (const json::exception& e) {
    throw Error(std::string("corrupt summary.json: ") + e.what());
  }
  return row;
}

// The config with the fault-tolerance switch and output location removed.
json ConfigSansFt(const json& summary) {
  if (!summary.contains("config")) return json();
  json c = summary["config"];
  if (c.contains("fault_tolerance")) c["fault_tolerance"].erase("enabled");
  c.erase("output_dir");
  return c;
}

std::string RunsReport(const fs::path& dir) {
  if (fs::exists(dir / "summary.json")) {
    return RenderTable("Configuration",
                       {RowFromSummary(ReadJsonFile(dir / "summary.json"),
                                       dir.filename().string())});
  }
  std::vector<fs::path> runs;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_directory() && fs::exists(entry.path() / "summary.json")) {
      runs.push_back(entry.path());
    }
  }
  if (runs.empty()) {
    throw Error("no summary.json or sweep.csv found under " + dir.string());
  }
  std::sort(runs.begin(), runs.end());

  std::vector<json> summaries;
  for (const auto& r : runs) summaries.push_back(ReadJsonFile(r / "summary.json"));

  // Two runs that differ only in fault_tolerance.enabled are labelled by it.
  std::vector<std::string> labels;
  for (const auto& r : runs) labels.push_back(r.filename().string());
  if (summaries.size() == 2 && !ConfigSansFt(summaries[0]).is_null() &&
      ConfigSansFt(summaries[0]) == ConfigSansFt(summaries[1])) {
    for (std::size_t i = 0; i < 2; ++i) {
      const bool ft = summaries[i]["config"]["fault_tolerance"]["enabled"]
                          .get<bool>();
      labels[i] = ft ? "With Fault Tolerance" : "Without Fault Tolerance";
    }
    if (labels[0] != labels[1] && labels[0] == "With Fault Tolerance") {
      std::swap(labels[0], labels[1]);
      std::swap(summaries[0], summaries[1]);
    }
  }
  std::vector<MetricRow> rows;
  for (std::size_t i = 0; i < summaries.size(); ++i) {
    rows.push_back(RowFromSummary(summaries[i], labels[i]));
  }
  return RenderTable("Configuration", rows);
}

}  // namespace

int CmdRun(const fs::path& config_path,
           const std::vector<std::string>& overrides, std::ostream& diag) {
  ExperimentConfig cfg;
  try {
    std::ifstream in(config_path);
    if (!in) throw ConfigError(config_path.string(), "cannot open config file");
    json doc;
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw ConfigError(config_path.string(),
                        std::string("invalid JSON: ") + e.what());
    }
    for (const auto& o : overrides) ApplyOverride(doc, o);
    cfg = ParseConfig(doc);
    if (const char* seed = std::getenv("FEDSEL_SEED")) {
      char* end = nullptr;
      const unsigned long long v = std::strtoull(seed, &end, 10);
      if (*seed == '\0' || *end != '\0' || *seed == '-') {
        throw ConfigError("FEDSEL_SEED", "must be a non-negative integer");
      }
      cfg.master_seed = v;
    }
  } catch (const ConfigError& e) {
    diag << "config error:\n" << e.what() << "\n";
    return kExitConfigError;
  }

  try {
    const ExperimentSummary s = RunIntoDirectory(cfg, cfg.output_dir);
    diag << "run complete: " << s.rounds << " rounds, final accuracy "
         << Fixed(s.final_eval.accuracy, 4) << ", sim time "
         << Fixed(s.total_sim_time_s, 3) << " s -> " << cfg.output_dir
         << "\n";
  } catch (const std::exception& e) {
    diag << "runtime error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}

int CmdSweep(const fs::path& sweep_path, std::size_t jobs_override,
             std::ostream& diag) {
  SweepSpec spec;
  try {
    spec = LoadSweepSpec(sweep_path);
  } catch (const ConfigError& e) {
    diag << "config error:\n" << e.what() << "\n";
    return kExitConfigError;
  }
  if (jobs_override > 0) spec.jobs = jobs_override;

  struct Point {
    double value;
    std::uint64_t seed;
    std::optional<ExperimentSummary> summary;
  };
  std::vector<Point> points;
  for (double v : spec.values) {
    for (std::uint64_t s : spec.seeds) points.push_back({v, s, std::nullopt});
  }
  std::stable_sort(points.begin(), points.end(),
                   [](const Point& a, const Point& b) {
                     if (a.value != b.value) return a.value < b.value;
                     return a.seed < b.seed;
                   });

  const fs::path root = spec.output_dir;
  std::mutex diag_mu;
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) {
      if (failed) return;
      Point& p = points[i];
      ExperimentConfig cfg =
          ApplySweepPoint(spec.base, spec.axis, p.value, p.seed);
      cfg.output_dir = (root / (std::string(AxisName(spec.axis)) + "_" +
                                FormatNumber(p.value)) /
                        ("seed_" + std::to_string(p.seed)))
                           .string();
      try {
        p.summary = RunIntoDirectory(cfg, cfg.output_dir);
      } catch (const std::exception& e) {
        std::lock_guard lock(diag_mu);
        diag << "runtime error in " << cfg.output_dir << ": " << e.what()
             << "\n";
        failed = true;
        return;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < std::min(spec.jobs, points.size()); ++j) {
      pool.emplace_back(worker);
    }
  }

  try {
    fs::create_directories(root);
    std::ostringstream csv;
    csv << kSweepCsvHeader << "\n";
    std::size_t rows = 0;
    for (const auto& p : points) {
      if (!p.summary) continue;
      csv << FormatNumber(p.value) << ',' << p.seed << ','
          << FormatNumber(p.summary->final_eval.accuracy) << ','
          << FormatNumber(p.summary->final_eval.auc_roc) << ','
          << FormatNumber(p.summary->total_sim_time_s) << ','
          << FormatNumber(p.summary->ledger.epsilon_total) << "\n";
      ++rows;
    }
    WriteTextFile(root / "sweep.csv", csv.str());
    nlohmann::ordered_json meta;
    meta["axis"] = AxisName(spec.axis);
    meta["values"] = spec.values;
    meta["seeds"] = spec.seeds;
    meta["base"] = ConfigToJson(spec.base);
    WriteTextFile(root / "sweep.json", meta.dump(2) + "\n");
    diag << "sweep " << (failed ? "aborted" : "complete") << ": " << rows
         << " of " << points.size() << " runs -> " << root.string() << "\n";
  } catch (const std::exception& e) {
    diag << "runtime error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return failed ? kExitRuntimeError : kExitOk;
}

int CmdReport(const fs::path& dir, std::ostream& out, std::ostream& diag) {
  try {
    if (!fs::is_directory(dir)) throw Error(dir.string() + " is not a directory");
    const std::string table = fs::exists(dir / "sweep.csv")
                                  ? SweepReport(dir)
                                  : RunsReport(dir);
    WriteTextFile(dir / "report.md", table);
    out << table;
  } catch (const std::exception& e) {
    diag << "report error: " << e.what() << "\n";
    return kExitRuntimeError;
  }
  return kExitOk;
}

}  // namespace fedsel
