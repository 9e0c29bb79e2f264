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

#include "fedsel/checkpoint.h"

#include <zlib.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "fedsel/error.h"

namespace fedsel {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'F', 'S', 'C', 'P'};
// magic + version + client + round + step + count, then cursor + crc.
constexpr std::size_t kHeaderBytes = 4 + 4 + 8 + 8 + 8 + 8;
constexpr std::size_t kTrailerBytes = 8 + 4;

template <typename T>
void PutLe(std::vector<std::uint8_t>& out, T value) {
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<std::uint8_t>(value >> (8 * i)));
  }
}

template <typename T>
T GetLe(std::span<const std::uint8_t> bytes, std::size_t& offset) {
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    value |= static_cast<T>(bytes[offset + i]) << (8 * i);
  }
  offset += sizeof(T);
  return value;
}

std::uint32_t Crc32(std::span<const std::uint8_t> bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, bytes.data(), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<std::uint8_t> SerializeCheckpoint(const CheckpointRecord& record) {
  std::vector<std::uint8_t> out;
  out.reserve(kHeaderBytes + 8 * record.model_params.size() + kTrailerBytes);
  for (auto byte : kMagic) out.push_back(static_cast<std::uint8_t>(byte));
  PutLe<std::uint32_t>(out, record.format_version);
  PutLe<std::uint64_t>(out, record.client_id);
  PutLe<std::uint64_t>(out, record.round);
  PutLe<std::uint64_t>(out, record.step);
  PutLe<std::uint64_t>(out, record.model_params.size());
  for (double p : record.model_params) {
    PutLe<std::uint64_t>(out, std::bit_cast<std::uint64_t>(p));
  }
  PutLe<std::uint64_t>(out, record.rng_cursor);
  PutLe<std::uint32_t>(out, Crc32(out));
  return out;
}

CheckpointRecord DeserializeCheckpoint(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kHeaderBytes + kTrailerBytes) {
    throw IntegrityError("checkpoint truncated: " +
                         std::to_string(bytes.size()) + " bytes");
  }
  if (!std::equal(kMagic.begin(), kMagic.end(), bytes.begin())) {
    throw IntegrityError("checkpoint has bad magic");
  }
  std::size_t offset = 4;
  CheckpointRecord r;
  r.format_version = GetLe<std::uint32_t>(bytes, offset);
  if (r.format_version != kCheckpointFormatVersion) {
    throw IntegrityError("unsupported checkpoint format version " +
                         std::to_string(r.format_version));
  }
  r.client_id = static_cast<ClientId>(GetLe<std::uint64_t>(bytes, offset));
  r.round = GetLe<std::uint64_t>(bytes, offset);
  r.step = GetLe<std::uint64_t>(bytes, offset);
  const auto count = GetLe<std::uint64_t>(bytes, offset);
  if (count > (bytes.size() - kHeaderBytes - kTrailerBytes) / 8 ||
      bytes.size() != kHeaderBytes + 8 * count + kTrailerBytes) {
    throw IntegrityError("checkpoint length does not match parameter count " +
                         std::to_string(count));
  }
  const std::uint32_t expected_crc =
      Crc32(bytes.first(bytes.size() - sizeof(std::uint32_t)));
  std::size_t crc_offset = bytes.size() - sizeof(std::uint32_t);
  if (GetLe<std::uint32_t>(bytes, crc_offset) != expected_crc) {
    throw IntegrityError("checkpoint CRC mismatch");
  }
  r.model_params.resize(count);
  for (double& p : r.model_params) {
    p = std::bit_cast<double>(GetLe<std::uint64_t>(bytes, offset));
    if (!std::isfinite(p)) {
      throw IntegrityError("checkpoint holds non-finite parameters");
    }
  }
  r.rng_cursor = GetLe<std::uint64_t>(bytes, offset);
  return r;
}

void MemoryCheckpointStore::Save(const CheckpointRecord& record) {
  auto bytes = SerializeCheckpoint(record);
  std::lock_guard lock(mu_);
  blobs_[{record.client_id, record.round}] = std::move(bytes);
  ++saves_;
}

std::optional<CheckpointRecord> MemoryCheckpointStore::Load(
    ClientId client_id, std::uint64_t round) {
  std::vector<std::uint8_t> bytes;
  {
    std::lock_guard lock(mu_);
    const auto it = blobs_.find({client_id, round});
    if (it == blobs_.end()) return std::nullopt;
    bytes = it->second;
  }
  return DeserializeCheckpoint(bytes);
}

void MemoryCheckpointStore::Erase(ClientId client_id, std::uint64_t round) {
  std::lock_guard lock(mu_);
  blobs_.erase({client_id, round});
}

std::size_t MemoryCheckpointStore::saves() const {
  std::lock_guard lock(mu_);
  return saves_;
}

FileCheckpointStore::FileCheckpointStore(std::filesystem::path run_dir)
    : run_dir_(std::move(run_dir)) {}

std::filesystem::path FileCheckpointStore::PathFor(ClientId client_id,
                                                   std::uint64_t round) const {
  return run_dir_ / "ckpt" / ("client_" + std::to_string(client_id)) /
         ("round_" + std::to_string(round) + ".ckpt");
}

void FileCheckpointStore::Save(const CheckpointRecord& record) {
  const auto path = PathFor(record.client_id, record.round);
  const auto bytes = SerializeCheckpoint(record);
  std::error_code ec;
  std::filesystem::create_directories(path.parent_path(), ec);
  if (ec) {
    throw StorageError("cannot create " + path.parent_path().string() + ": " +
                       ec.message());
  }
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw StorageError("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    throw StorageError("cannot rename " + tmp.string() + ": " + ec.message());
  }
}

std::optional<CheckpointRecord> FileCheckpointStore::Load(ClientId client_id,
                                                          std::uint64_t round) {
  const auto path = PathFor(client_id, round);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  const std::vector<std::uint8_t> bytes(std::istreambuf_iterator<char>(in),
                                        {});
  return DeserializeCheckpoint(bytes);
}

void FileCheckpointStore::Erase(ClientId client_id, std::uint64_t round) {
  std::error_code ec;
  std::filesystem::remove(PathFor(client_id, round), ec);
}

}  // namespace fedsel
