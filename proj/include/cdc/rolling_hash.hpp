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

#ifndef CDC_ROLLING_HASH_HPP_
#define CDC_ROLLING_HASH_HPP_

#include <array>
#include <bit>
#include <cstdint>
#include <span>
#include <vector>

#include "cdc/core.hpp"

namespace cdc {

// Per-byte lookup table shared by Buzhash and Gear.
template <typename Word>
struct BasicByteTable {
  std::array<Word, 256> entries{};
  std::uint64_t seed = 0;

  Word operator[](std::uint8_t b) const { return entries[b]; }
  bool operator==(const BasicByteTable&) const = default;
};

using ByteTable = BasicByteTable<std::uint32_t>;
using ByteTable64 = BasicByteTable<std::uint64_t>;

// Entries are successive outputs of Xorshift64Star(seed) (upper half for the
// 32-bit table).
ByteTable make_byte_table(std::uint64_t seed = kDefaultTableSeed);
ByteTable64 make_byte_table64(std::uint64_t seed = kDefaultTableSeed);

// Polynomial rolling hash H = B1*x^(w-1) + ... + Bw over Z/2^64.
class RabinHash {
 public:
  static constexpr std::uint64_t kBase = 1000000007ULL;

  explicit RabinHash(std::uint32_t window);

  std::uint32_t window() const { return window_; }

  // `bytes` must hold exactly window() bytes.
  std::uint64_t init(std::span<const std::uint8_t> bytes) const;

  std::uint64_t roll(std::uint64_t h, std::uint8_t out, std::uint8_t in) const {
    return (h - out * out_factor_) * kBase + in;
  }

 private:
  std::uint32_t window_;
  std::uint64_t out_factor_;  // x^(w-1)
};

// Cyclic-polynomial hash: H = rot^(w-1)(T[B1]) ^ ... ^ T[Bw] on 32-bit words.
class Buzhash {
 public:
  Buzhash(std::uint32_t window, const ByteTable& table);

  std::uint32_t window() const { return window_; }

  std::uint32_t init(std::span<const std::uint8_t> bytes) const;

  std::uint32_t roll(std::uint32_t h, std::uint8_t out, std::uint8_t in) const {
    return std::rotl(h, 1) ^ out_table_[out] ^ table_[in];
  }

  // Fill step used while the first window is still being loaded.
  std::uint32_t append(std::uint32_t h, std::uint8_t in) const {
    return std::rotl(h, 1) ^ table_[in];
  }

 private:
  std::uint32_t window_;
  std::array<std::uint32_t, 256> table_;
  std::array<std::uint32_t, 256> out_table_;  // rot^(w mod 32)(T[b])
};

inline std::uint32_t gear_update(std::uint32_t h, std::uint8_t in,
                                 const ByteTable& table) {
  return (h << 1) + table[in];
}

inline std::uint64_t gear_update(std::uint64_t h, std::uint8_t in,
                                 const ByteTable64& table) {
  return (h << 1) + table[in];
}

enum class RollingKind { kRabin, kBuzhash, kGear };

// Byte-at-a-time rolling state. For Rabin and Buzhash value() is the hash of
// the last w bytes once at least w bytes were pushed; for Gear it is the full
// prefix folded through the Gear recurrence (32-bit).
class RollingState {
 public:
  RollingState(RollingKind kind, std::uint32_t window,
               const ByteTable& table = make_byte_table());

  void push(std::uint8_t in);
  std::uint64_t value() const { return hash_; }
  std::uint64_t pushed() const { return pushed_; }
  RollingKind kind() const { return kind_; }

 private:
  RollingKind kind_;
  std::uint32_t window_;
  ByteTable table_;
  RabinHash rabin_;
  Buzhash buzhash_;
  std::vector<std::uint8_t> ring_;
  std::size_t ring_pos_ = 0;
  std::uint64_t pushed_ = 0;
  std::uint64_t hash_ = 0;
};

}  // namespace cdc

#endif  // CDC_ROLLING_HASH_HPP_
