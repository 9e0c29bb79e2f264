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

#ifndef FEDSEL_RNG_H_
#define FEDSEL_RNG_H_

#include <cstdint>
#include <limits>
#include <random>

namespace fedsel {

// Purposes for which independent random streams are derived from the master
// seed. Each (purpose, client, round) triple gets its own engine so results do
// not depend on the order in which clients are executed.
enum class StreamPurpose : std::uint32_t {
  kData = 1,
  kPartition = 2,
  kSplit = 3,
  kModelInit = 4,
  kCapacity = 5,
  kAvailability = 6,
  kSelection = 7,
  kFailure = 8,
  kNoise = 9,
};

// A 64-bit Mersenne Twister that counts how many words it has produced. The
// count is the stream cursor stored in checkpoints; Restore() reseeds and
// discards up to it.
class RngStream {
 public:
  using result_type = std::mt19937_64::result_type;

  RngStream(std::uint64_t master_seed, StreamPurpose purpose,
            std::uint64_t client_id = 0, std::uint64_t round = 0);

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }

  result_type operator()() {
    ++cursor_;
    return engine_();
  }

  std::uint64_t cursor() const { return cursor_; }

  // Rewinds the stream to its initial state and advances it to `cursor`.
  void Restore(std::uint64_t cursor);

 private:
  std::seed_seq::result_type seed_words_[8];
  std::mt19937_64 engine_;
  std::uint64_t cursor_ = 0;
};

}  // namespace fedsel

#endif  // FEDSEL_RNG_H_
