// Copyright 2026 The cdcbench Authors
// SPDX-License-Identifier: Apache-2.0
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

#ifndef CDC_RANDOM_HPP_
#define CDC_RANDOM_HPP_

#include <cstdint>

namespace cdc {

inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

// SplitMix64 finaliser.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based SplitMix64: word i of the stream for `seed` is
// mix64(seed + (i + 1) * gamma), so any offset can be produced directly.
constexpr std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + (index + 1) * kGoldenGamma);
}

// Marsaglia/Vigna xorshift64*. State is seeded through SplitMix64 and is
// never zero.
class Xorshift64Star {
 public:
  explicit constexpr Xorshift64Star(std::uint64_t seed)
      : state_(splitmix64_at(seed, 0) | 1) {}

  constexpr std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }
  constexpr result_type operator()() { return next(); }

 private:
  std::uint64_t state_;
};

}  // namespace cdc

#endif  // CDC_RANDOM_HPP_
