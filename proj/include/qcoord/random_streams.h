// Copyright 2026 The qcoord Authors
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

// Counter-based uniform streams. Every value is a pure function of
// (key, counter), so any round's draws can be recomputed in isolation and in
// any order.

#ifndef QCOORD_RANDOM_STREAMS_H_
#define QCOORD_RANDOM_STREAMS_H_

#include <cstdint>

namespace qcoord {

// SplitMix64 output function.
constexpr std::uint64_t Mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Key for the substream addressed by (seed, domain, index).
constexpr std::uint64_t DeriveKey(std::uint64_t seed, std::uint64_t domain,
                                  std::uint64_t index = 0) {
  return Mix64(Mix64(Mix64(seed) ^ domain) ^ index);
}

// Top 53 bits as a double in [0, 1).
constexpr double ToUnitInterval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

class CounterStream {
 public:
  explicit constexpr CounterStream(std::uint64_t key) : key_(key) {}

  constexpr double NextUniform() {
    return ToUnitInterval(Mix64(key_ + 0x632be59bd9b4e019ULL * ++counter_));
  }

  constexpr std::uint64_t consumed() const { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Domains that keep the harness's substreams apart.
namespace stream_domain {
inline constexpr std::uint64_t kRound = 0x726f756e64ULL;       // per-round draws
inline constexpr std::uint64_t kCommitment = 0x636f6d6d6974ULL;  // pre-committed boxes
inline constexpr std::uint64_t kCommonSeed = 0x736565640ULL;   // allies' shared PRNG
}  // namespace stream_domain

}  // namespace qcoord

#endif  // QCOORD_RANDOM_STREAMS_H_
