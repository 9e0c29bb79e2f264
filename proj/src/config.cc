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

#include "fedsel/config.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <utility>

#include "fedsel/error.h"

namespace fedsel {
namespace {

using nlohmann::json;

std::string Join(const std::string& prefix, const std::string& key) {
  return prefix.empty() ? key : prefix + "." + key;
}

// Walks one JSON object, recording type errors and unknown keys.
class ObjectReader {
 public:
  ObjectReader(const json& obj, std::string prefix,
               std::vector<ConfigIssue>& issues)
      : obj_(obj), prefix_(std::move(prefix)), issues_(issues) {}

  // Call once every expected key has been visited.
  void RejectUnknown() {
    if (!obj_.is_object()) return;
    for (const auto& [key, value] : obj_.items()) {
      if (!known_.count(key)) Issue(key, "unknown key");
    }
  }

  bool Has(const std::string& key) {
    known_.insert(key);
    return obj_.is_object() && obj_.contains(key);
  }

  void Require(const std::string& key) {
    if (!Has(key)) Issue(key, "required key is missing");
  }

  void Number(const std::string& key, double& out) {
    if (!Has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_number()) return Issue(key, "expected a number");
    out = v.get<double>();
    if (!std::isfinite(out)) Issue(key, "expected a finite number");
  }

  template <typename Int>
  void Unsigned(const std::string& key, Int& out) {
    if (!Has(key)) return;
    const json& v = obj_.at(key);
    if (v.is_number_unsigned()) {
      out = static_cast<Int>(v.get<std::uint64_t>());
    } else if (v.is_number_integer()) {
      Issue(key, "expected a non-negative integer");
    } else {
      Issue(key, "expected an integer");
    }
  }

  void Bool(const std::string& key, bool& out) {
    if (!Has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_boolean()) return Issue(key, "expected true or false");
    out = v.get<bool>();
  }

  void String(const std::string& key, std::string& out) {
    if (!Has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_string()) return Issue(key, "expected a string");
    out = v.get<std::string>();
  }

  template <typename E>
  void Enum(const std::string& key, E& out,
            const std::map<std::string, E>& names) {
    if (!Has(key)) return;
    const json& v = obj_.at(key);
    std::string allowed;
    for (const auto& [name, value] : names) {
      allowed += (allowed.empty() ? "" : ", ") + name;
    }
    if (!v.is_string()) return Issue(key, "expected one of: " + allowed);
    const auto it = names.find(v.get<std::string>());
    if (it == names.end()) {
      return Issue(key, "unrecognized value '" + v.get<std::string>() +
                            "', expected one of: " + allowed);
    }
    out = it->second;
  }

  void Object(const std::string& key,
              const std::function<void(ObjectReader&)>& body) {
    if (!Has(key)) return;
    const json& v = obj_.at(key);
    if (!v.is_object()) return Issue(key, "expected an object");
    ObjectReader child(v, Join(prefix_, key), issues_);
    body(child);
    child.RejectUnknown();
  }

  void Issue(const std::string& key, const std::string& message) {
    issues_.push_back({Join(prefix_, key), message});
  }

 private:
  const json& obj_;
  std::string prefix_;
  std::vector<ConfigIssue>& issues_;
  std::set<std::string> known_;
};

const std::map<std::string, DataSource> kSources = {
    {"synthetic", DataSource::kSynthetic}, {"csv", DataSource::kCsv}};
const std::map<std::string, PartitionStrategy> kPartitions = {
    {"iid", PartitionStrategy::kIid},
    {"dirichlet", PartitionStrategy::kDirichlet}};
const std::map<std::string, ModelKind> kModels = {
    {"logistic", ModelKind::kLogistic}, {"mlp", ModelKind::kMlp}};
const std::map<std::string, Strategy> kStrategies = {
    {"proposed", Strategy::kProposed},
    {"random", Strategy::kRandom},
    {"full", Strategy::kFull},
    {"static_k", Strategy::kStaticK}};
const std::map<std::string, SweepAxis> kAxes = {
    {"epsilon", SweepAxis::kEpsilon},
    {"k", SweepAxis::kK},
    {"failure_prob", SweepAxis::kFailureProb},
    {"checkpoint_interval", SweepAxis::kCheckpointInterval}};

template <typename E>
std::string NameOf(const std::map<std::string, E>& names, E value) {
  for (const auto& [name, v] : names) {
    if (v == value) return name;
  }
  return "?";
}

void Validate(const ExperimentConfig& c, std::vector<ConfigIssue>& issues) {
  auto check = [&](bool ok, const char* path, const char* message) {
    if (!ok) issues.push_back({path, message});
  };
  const auto& d = c.data;
  if (d.source == DataSource::kSynthetic) {
    check(d.n_samples >= 2, "data.n_samples", "must be >= 2");
    check(d.n_features >= 1, "data.n_features", "must be >= 1");
    check(d.class_sep > 0.0, "data.class_sep", "must be > 0");
  } else {
    check(!d.path.empty(), "data.path", "required for csv data");
    check(!d.label_column.empty(), "data.label_column", "must be non-empty");
  }
  check(d.train_fraction > 0.0 && d.train_fraction < 1.0,
        "data.train_fraction", "must lie in (0, 1)");
  check(c.n_clients >= 1, "n_clients", "must be >= 1");
  check(c.dirichlet_alpha > 0.0, "partition.alpha", "must be > 0");
  check(c.model != ModelKind::kMlp || c.hidden_width >= 1,
        "model.hidden_width", "must be >= 1");
  check(c.training.batch_size >= 1, "batch_size", "must be >= 1");
  check(c.training.lr > 0.0, "lr", "must be > 0");
  check(c.training.server_lr > 0.0, "server_lr", "must be > 0");

  const auto& s = c.selection;
  check(s.k_min >= 1, "selection.k_min", "must be >= 1");
  check(s.k_init >= s.k_min && s.k_init <= s.k_max, "selection.k_init",
        "must satisfy k_min <= k_init <= k_max");
  check(s.w_data >= 0.0, "selection.w_data", "must be >= 0");
  check(s.w_compute >= 0.0, "selection.w_compute", "must be >= 0");
  check(std::abs(s.w_data + s.w_compute - 1.0) <= 1e-9, "selection.w_compute",
        "w_data + w_compute must equal 1");
  check(s.time_budget_per_round > 0.0, "selection.time_budget_per_round",
        "must be > 0");

  check(c.p_avail >= 0.0 && c.p_avail <= 1.0, "p_avail",
        "must lie in [0, 1]");
  check(c.capacity.min > 0.0, "clients.capacity_min", "must be > 0");
  check(c.capacity.max >= c.capacity.min, "clients.capacity_max",
        "must be >= capacity_min");

  check(c.privacy.epsilon_round > 0.0, "privacy.epsilon_round", "must be > 0");
  check(c.privacy.delta > 0.0 && c.privacy.delta < 1.0, "privacy.delta",
        "must lie in (0, 1)");
  check(c.privacy.clip_norm > 0.0, "privacy.clip_norm", "must be > 0");

  check(c.fault_tolerance.checkpoint_interval_steps >= 1,
        "fault_tolerance.checkpoint_interval_steps", "must be >= 1");
  check(c.fault_tolerance.failure_prob_per_round >= 0.0 &&
            c.fault_tolerance.failure_prob_per_round <= 1.0,
        "fault_tolerance.failure_prob_per_round", "must lie in [0, 1]");

  check(c.cost_model.base_step_cost >= 0.0, "cost_model.base_step_cost",
        "must be >= 0");
  check(c.cost_model.aggregation_cost >= 0.0, "cost_model.aggregation_cost",
        "must be >= 0");
  check(c.cost_model.checkpoint_cost >= 0.0, "cost_model.checkpoint_cost",
        "must be >= 0");
  check(c.cost_model.recovery_cost >= 0.0, "cost_model.recovery_cost",
        "must be >= 0");
  check(c.threads >= 1, "threads", "must be >= 1");
}

}  // namespace

const char* StrategyName(Strategy s) {
  switch (s) {
    case Strategy::kProposed: return "proposed";
    case Strategy::kRandom: return "random";
    case Strategy::kFull: return "full";
    case Strategy::kStaticK: return "static_k";
  }
  return "?";
}

const char* AxisName(SweepAxis a) {
  switch (a) {
    case SweepAxis::kEpsilon: return "epsilon";
    case SweepAxis::kK: return "k";
    case SweepAxis::kFailureProb: return "failure_prob";
    case SweepAxis::kCheckpointInterval: return "checkpoint_interval";
  }
  return "?";
}

ExperimentConfig ParseConfig(const json& doc) {
  std::vector<ConfigIssue> issues;
  ExperimentConfig c;
  if (!doc.is_object()) {
    throw ConfigError("(root)", "config must be a JSON object");
  }
  {
    ObjectReader r(doc, "", issues);
    r.Require("data");
    r.Require("rounds");
    r.Object("data", [&](ObjectReader& d) {
      d.Enum("source", c.data.source, kSources);
      d.Unsigned("n_samples", c.data.n_samples);
      d.Unsigned("n_features", c.data.n_features);
      d.Number("class_sep", c.data.class_sep);
      d.String("path", c.data.path);
      d.String("label_column", c.data.label_column);
      d.Number("train_fraction", c.data.train_fraction);
    });
    r.Unsigned("n_clients", c.n_clients);
    r.Object("partition", [&](ObjectReader& p) {
      p.Enum("strategy", c.partition, kPartitions);
      p.Number("alpha", c.dirichlet_alpha);
    });
    r.Object("model", [&](ObjectReader& m) {
      m.Enum("arch", c.model, kModels);
      m.Unsigned("hidden_width", c.hidden_width);
    });
    r.Unsigned("rounds", c.rounds);
    r.Unsigned("local_epochs", c.training.local_epochs);
    r.Unsigned("batch_size", c.training.batch_size);
    r.Number("lr", c.training.lr);
    r.Number("server_lr", c.training.server_lr);
    r.Enum("strategy", c.strategy, kStrategies);
    r.Object("selection", [&](ObjectReader& s) {
      s.Unsigned("k_init", c.selection.k_init);
      s.Unsigned("k_min", c.selection.k_min);
      s.Unsigned("k_max", c.selection.k_max);
      s.Number("w_data", c.selection.w_data);
      s.Number("w_compute", c.selection.w_compute);
      s.Number("time_budget_per_round", c.selection.time_budget_per_round);
      s.Number("min_accuracy_gain", c.selection.min_accuracy_gain);
    });
    r.Number("p_avail", c.p_avail);
    r.Object("clients", [&](ObjectReader& k) {
      k.Number("capacity_min", c.capacity.min);
      k.Number("capacity_max", c.capacity.max);
    });
    r.Object("privacy", [&](ObjectReader& p) {
      p.Bool("enabled", c.privacy.enabled);
      p.Number("epsilon_round", c.privacy.epsilon_round);
      p.Number("delta", c.privacy.delta);
      p.Number("clip_norm", c.privacy.clip_norm);
    });
    r.Object("fault_tolerance", [&](ObjectReader& f) {
      f.Bool("enabled", c.fault_tolerance.enabled);
      f.Unsigned("checkpoint_interval_steps",
                 c.fault_tolerance.checkpoint_interval_steps);
      f.Number("failure_prob_per_round",
               c.fault_tolerance.failure_prob_per_round);
    });
    r.Object("cost_model", [&](ObjectReader& m) {
      m.Number("base_step_cost", c.cost_model.base_step_cost);
      m.Number("aggregation_cost", c.cost_model.aggregation_cost);
      m.Number("checkpoint_cost", c.cost_model.checkpoint_cost);
      m.Number("recovery_cost", c.cost_model.recovery_cost);
    });
    r.Unsigned("master_seed", c.master_seed);
    r.String("output_dir", c.output_dir);
    r.Unsigned("threads", c.threads);
    r.Bool("record_wall_clock", c.record_wall_clock);
    r.RejectUnknown();
  }
  Validate(c, issues);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  return c;
}

ExperimentConfig LoadConfig(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open config file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return ParseConfig(doc);
}

nlohmann::ordered_json ConfigToJson(const ExperimentConfig& c) {
  nlohmann::ordered_json j;
  j["data"] = {{"source", NameOf(kSources, c.data.source)},
               {"n_samples", c.data.n_samples},
               {"n_features", c.data.n_features},
               {"class_sep", c.data.class_sep},
               {"path", c.data.path},
               {"label_column", c.data.label_column},
               {"train_fraction", c.data.train_fraction}};
  j["n_clients"] = c.n_clients;
  j["partition"] = {{"strategy", NameOf(kPartitions, c.partition)},
                    {"alpha", c.dirichlet_alpha}};
  j["model"] = {{"arch", NameOf(kModels, c.model)},
                {"hidden_width", c.hidden_width}};
  j["rounds"] = c.rounds;
  j["local_epochs"] = c.training.local_epochs;
  j["batch_size"] = c.training.batch_size;
  j["lr"] = c.training.lr;
  j["server_lr"] = c.training.server_lr;
  j["strategy"] = StrategyName(c.strategy);
  j["selection"] = {{"k_init", c.selection.k_init},
                    {"k_min", c.selection.k_min},
                    {"k_max", c.selection.k_max},
                    {"w_data", c.selection.w_data},
                    {"w_compute", c.selection.w_compute},
                    {"time_budget_per_round",
                     c.selection.time_budget_per_round},
                    {"min_accuracy_gain", c.selection.min_accuracy_gain}};
  j["p_avail"] = c.p_avail;
  j["clients"] = {{"capacity_min", c.capacity.min},
                  {"capacity_max", c.capacity.max}};
  j["privacy"] = {{"enabled", c.privacy.enabled},
                  {"epsilon_round", c.privacy.epsilon_round},
                  {"delta", c.privacy.delta},
                  {"clip_norm", c.privacy.clip_norm}};
  j["fault_tolerance"] = {
      {"enabled", c.fault_tolerance.enabled},
      {"checkpoint_interval_steps",
       c.fault_tolerance.checkpoint_interval_steps},
      {"failure_prob_per_round", c.fault_tolerance.failure_prob_per_round}};
  j["cost_model"] = {{"base_step_cost", c.cost_model.base_step_cost},
                     {"aggregation_cost", c.cost_model.aggregation_cost},
                     {"checkpoint_cost", c.cost_model.checkpoint_cost},
                     {"recovery_cost", c.cost_model.recovery_cost}};
  j["master_seed"] = c.master_seed;
  j["output_dir"] = c.output_dir;
  j["threads"] = c.threads;
  j["record_wall_clock"] = c.record_wall_clock;
  return j;
}

void ApplyOverride(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError(assignment, "override must look like key=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json value;
  try {
    value = json::parse(text);
  } catch (const json::parse_error&) {
    value = text;
  }

  json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot - start);
    if (part.empty()) throw ConfigError(key, "empty path component");
    if (!node->is_object()) {
      throw ConfigError(key, "cannot descend into a non-object value");
    }
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    if (node->is_null()) *node = json::object();
    start = dot + 1;
  }
}

SweepSpec ParseSweepSpec(const json& doc,
                         const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("(root)", "sweep must be an object");
  std::vector<ConfigIssue> issues;
  SweepSpec spec;
  json base_doc;
  {
    ObjectReader r(doc, "", issues);
    r.Require("base");
    r.Require("axis");
    r.Require("values");
    r.Require("seeds");
    if (r.Has("base")) {
      const json& b = doc.at("base");
      if (b.is_string()) {
        const auto path = base_dir / b.get<std::string>();
        std::ifstream in(path);
        if (!in) {
          r.Issue("base", "cannot open " + path.string());
        } else {
          try {
            base_doc = json::parse(in);
          } catch (const json::parse_error& e) {
            r.Issue("base", std::string("invalid JSON: ") + e.what());
          }
        }
      } else if (b.is_object()) {
        base_doc = b;
      } else {
        r.Issue("base", "expected an object or a config file path");
      }
    }
    r.Enum("axis", spec.axis, kAxes);
    if (r.Has("values")) {
      const json& v = doc.at("values");
      if (!v.is_array() || v.empty()) {
        r.Issue("values", "expected a non-empty array of numbers");
      } else {
        for (const auto& x : v) {
          if (!x.is_number()) {
            r.Issue("values", "expected numbers");
            break;
          }
          spec.values.push_back(x.get<double>());
        }
      }
    }
    if (r.Has("seeds")) {
      const json& v = doc.at("seeds");
      if (!v.is_array() || v.empty()) {
        r.Issue("seeds", "expected a non-empty array of integers");
      } else {
        for (const auto& x : v) {
          if (!x.is_number_integer() || x.get<std::int64_t>() < 0) {
            r.Issue("seeds", "expected non-negative integers");
            break;
          }
          spec.seeds.push_back(x.get<std::uint64_t>());
        }
      }
    }
    r.String("output_dir", spec.output_dir);
    r.Unsigned("jobs", spec.jobs);
    r.RejectUnknown();
  }
  if (spec.jobs < 1) issues.push_back({"jobs", "must be >= 1"});
  if (!issues.empty()) throw ConfigError(std::move(issues));

  try {
    spec.base = ParseConfig(base_doc);
  } catch (const ConfigError& e) {
    std::vector<ConfigIssue> nested;
    for (const auto& issue : e.issues()) {
      nested.push_back({"base." + issue.key_path, issue.message});
    }
    throw ConfigError(std::move(nested));
  }
  // Every sweep point must itself be a valid config.
  for (double value : spec.values) {
    try {
      ParseConfig(json::parse(
          ConfigToJson(ApplySweepPoint(spec.base, spec.axis, value, 0))
              .dump()));
    } catch (const ConfigError& e) {
      throw ConfigError("values", "value " + json(value).dump() +
                                      " gives an invalid config: " + e.what());
    }
  }
  return spec;
}

SweepSpec LoadSweepSpec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string(), "cannot open sweep file");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string(), std::string("invalid JSON: ") + e.what());
  }
  return ParseSweepSpec(doc, path.parent_path());
}

ExperimentConfig ApplySweepPoint(const ExperimentConfig& base, SweepAxis axis,
                                 double value, std::uint64_t seed) {
  ExperimentConfig c = base;
  c.master_seed = seed;
  const auto as_count = [](double v) {
    return v <= 0.0 ? std::size_t{0}
                    : static_cast<std::size_t>(std::llround(v));
  };
  switch (axis) {
    case SweepAxis::kEpsilon:
      c.privacy.enabled = true;
      c.privacy.epsilon_round = value;
      break;
    case SweepAxis::kK: {
      const std::size_t k = as_count(value);
      c.selection.k_init = k;
      c.selection.k_min = std::min(c.selection.k_min, k);
      c.selection.k_max = std::max(c.selection.k_max, k);
      break;
    }
    case SweepAxis::kFailureProb:
      c.fault_tolerance.failure_prob_per_round = value;
      break;
    case SweepAxis::kCheckpointInterval:
      c.fault_tolerance.checkpoint_interval_steps = as_count(value);
      break;
  }
  return c;
}

OrchestratorConfig MakeOrchestratorConfig(const ExperimentConfig& c) {
  OrchestratorConfig o;
  o.strategy = c.strategy;
  o.training = c.training;
  o.selection = c.selection;
  o.privacy = MakePrivacyParams(c.privacy.enabled, c.privacy.epsilon_round,
                                c.privacy.delta, c.privacy.clip_norm);
  o.fault_tolerance = c.fault_tolerance;
  o.cost = c.cost_model;
  o.p_avail = c.p_avail;
  o.master_seed = c.master_seed;
  o.threads = c.threads;
  o.record_wall_clock = c.record_wall_clock;
  return o;
}

}  // namespace fedsel
