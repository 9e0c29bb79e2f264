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

#ifndef FEDSEL_ERROR_H_
#define FEDSEL_ERROR_H_

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace fedsel {

// Base class for every error raised by the library. The CLI maps ConfigError
// to exit code 2 and everything else to exit code 3.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid argument to a library operation (counts, ranges, probabilities).
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Malformed CSV input. The message names the offending row and/or column.
class IngestionError : public Error {
 public:
  using Error::Error;
};

// Vector or matrix widths that do not line up.
class ShapeError : public Error {
 public:
  using Error::Error;
};

// A checkpoint could not be written or read from its backing store.
class StorageError : public Error {
 public:
  using Error::Error;
};

// A checkpoint was found but failed magic/version/length/CRC validation.
class IntegrityError : public Error {
 public:
  using Error::Error;
};

struct ConfigIssue {
  std::string key_path;  // dotted JSON path, e.g. "privacy.epsilon_round"
  std::string message;
};

// Invalid experiment configuration. Carries every violation found, each with
// the dotted path of the offending key.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<ConfigIssue> issues)
      : Error(Describe(issues)), issues_(std::move(issues)) {}
  ConfigError(std::string key_path, std::string message)
      : ConfigError(std::vector<ConfigIssue>{
            {std::move(key_path), std::move(message)}}) {}

  const std::vector<ConfigIssue>& issues() const { return issues_; }

 private:
  static std::string Describe(const std::vector<ConfigIssue>& issues) {
    std::string out;
    for (const auto& issue : issues) {
      if (!out.empty()) out += "\n";
      out += issue.key_path + ": " + issue.message;
    }
    return out;
  }

  std::vector<ConfigIssue> issues_;
};

}  // namespace fedsel

#endif  // FEDSEL_ERROR_H_
