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

#include "fedsel/rng.h"

namespace fedsel {
namespace {

std::mt19937_64 MakeEngine(const std::seed_seq::result_type (&words)[8]) {
  std::seed_seq seq(std::begin(words), std::end(words));
  return std::mt19937_64(seq);
}

}  // namespace

RngStream::RngStream(std::uint64_t master_seed, StreamPurpose purpose,
                     std::uint64_t client_id, std::uint64_t round)
    : seed_words_{
          static_cast<std::uint32_t>(master_seed),
          static_cast<std::uint32_t>(master_seed >> 32),
          static_cast<std::uint32_t>(purpose),
          static_cast<std::uint32_t>(client_id),
          static_cast<std::uint32_t>(client_id >> 32),
          static_cast<std::uint32_t>(round),
          static_cast<std::uint32_t>(round >> 32),
          0x46534c52u,  // "FSLR"
      },
      engine_(MakeEngine(seed_words_)) {}

void RngStream::Restore(std::uint64_t cursor) {
  engine_ = MakeEngine(seed_words_);
  engine_.discard(cursor);
  cursor_ = cursor;
}

}  // namespace fedsel
