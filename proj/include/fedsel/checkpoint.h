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

#ifndef FEDSEL_CHECKPOINT_H_
#define FEDSEL_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fedsel/selection.h"

namespace fedsel {

inline constexpr std::uint32_t kCheckpointFormatVersion = 1;

// Local training state of one client at a step boundary.
struct CheckpointRecord {
  ClientId client_id = 0;
  std::uint64_t round = 0;
  std::uint64_t step = 0;  // completed local steps
  std::vector<double> model_params;
  std::uint64_t rng_cursor = 0;
  std::uint32_t format_version = kCheckpointFormatVersion;

  bool operator==(const CheckpointRecord&) const = default;
};

// Binary layout, all integers and doubles little-endian:
//   "FSCP" | u32 format_version | u64 client_id | u64 round | u64 step |
//   u64 param_count | f64 params[param_count] | u64 rng_cursor | u32 crc32
// The CRC covers every byte before it.
std::vector<std::uint8_t> SerializeCheckpoint(const CheckpointRecord& record);

// Throws IntegrityError on bad magic, unknown version, length mismatch,
// CRC mismatch or non-finite parameters.
CheckpointRecord DeserializeCheckpoint(std::span<const std::uint8_t> bytes);

// Latest-wins storage keyed by (client_id, round). Implementations must allow
// concurrent calls for distinct keys.
class CheckpointStore {
 public:
  virtual ~CheckpointStore() = default;

  // Throws StorageError.
  virtual void Save(const CheckpointRecord& record) = 0;
  // nullopt when nothing is stored for the key. Throws IntegrityError for a
  // stored record that fails validation.
  virtual std::optional<CheckpointRecord> Load(ClientId client_id,
                                               std::uint64_t round) = 0;
  virtual void Erase(ClientId client_id, std::uint64_t round) = 0;
};

// Keeps serialized bytes in memory, so records still pass through the
// on-disk encoding and its integrity checks.
class MemoryCheckpointStore : public CheckpointStore {
 public:
  void Save(const CheckpointRecord& record) override;
  std::optional<CheckpointRecord> Load(ClientId client_id,
                                       std::uint64_t round) override;
  void Erase(ClientId client_id, std::uint64_t round) override;

  std::size_t saves() const;

 private:
  mutable std::mutex mu_;
  std::map<std::pair<ClientId, std::uint64_t>, std::vector<std::uint8_t>>
      blobs_;
  std::size_t saves_ = 0;
};

// Files under <run_dir>/ckpt/client_<id>/round_<t>.ckpt, written to a
// temporary name and renamed into place.
class FileCheckpointStore : public CheckpointStore {
 public:
  explicit FileCheckpointStore(std::filesystem::path run_dir);

  void Save(const CheckpointRecord& record) override;
  std::optional<CheckpointRecord> Load(ClientId client_id,
                                       std::uint64_t round) override;
  void Erase(ClientId client_id, std::uint64_t round) override;

  std::filesystem::path PathFor(ClientId client_id, std::uint64_t round) const;

 private:
  std::filesystem::path run_dir_;
};

}  // namespace fedsel

#endif  // FEDSEL_CHECKPOINT_H_
