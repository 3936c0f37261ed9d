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

#include "cdc/rolling_hash.hpp"

#include "cdc/random.hpp"

namespace cdc {

ByteTable make_byte_table(std::uint64_t seed) {
  ByteTable t;
  t.seed = seed;
  Xorshift64Star rng(seed);
  for (auto& e : t.entries) e = static_cast<std::uint32_t>(rng.next() >> 32);
  return t;
}

ByteTable64 make_byte_table64(std::uint64_t seed) {
  ByteTable64 t;
  t.seed = seed;
  Xorshift64Star rng(seed);
  for (auto& e : t.entries) e = rng.next();
  return t;
}

RabinHash::RabinHash(std::uint32_t window) : window_(window), out_factor_(1) {
  if (window == 0) throw Error(ErrorCode::kConfig, "rabin: window must be >= 1");
  for (std::uint32_t i = 1; i < window; ++i) out_factor_ *= kBase;
}

std::uint64_t RabinHash::init(std::span<const std::uint8_t> bytes) const {
  if (bytes.size() != window_) {
    throw Error(ErrorCode::kDomain, "rabin: init needs exactly w bytes");
  }
  std::uint64_t h = 0;
  for (std::uint8_t b : bytes) h = h * kBase + b;
  return h;
}

Buzhash::Buzhash(std::uint32_t window, const ByteTable& table)
    : window_(window), table_(table.entries) {
  if (window == 0) throw Error(ErrorCode::kConfig, "buzhash: window must be >= 1");
  const int r = static_cast<int>(window % 32);
  for (std::size_t i = 0; i < 256; ++i) out_table_[i] = std::rotl(table_[i], r);
}

std::uint32_t Buzhash::init(std::span<const std::uint8_t> bytes) const {
  if (bytes.size() != window_) {
    throw Error(ErrorCode::kDomain, "buzhash: init needs exactly w bytes");
  }
  std::uint32_t h = 0;
  for (std::uint8_t b : bytes) h = append(h, b);
  return h;
}

RollingState::RollingState(RollingKind kind, std::uint32_t window,
                           const ByteTable& table)
    : kind_(kind),
      window_(kind == RollingKind::kGear ? 32 : window),
      table_(table),
      rabin_(window_),
      buzhash_(window_, table),
      ring_(window_, 0) {}

void RollingState::push(std::uint8_t in) {
  switch (kind_) {
    case RollingKind::kGear:
      hash_ = gear_update(static_cast<std::uint32_t>(hash_), in, table_);
      ++pushed_;
      return;
    case RollingKind::kRabin:
      if (pushed_ < window_) {
        hash_ = hash_ * RabinHash::kBase + in;
      } else {
        hash_ = rabin_.roll(hash_, ring_[ring_pos_], in);
      }
      break;
    case RollingKind::kBuzhash: {
      const auto h = static_cast<std::uint32_t>(hash_);
      hash_ = pushed_ < window_ ? buzhash_.append(h, in)
                                : buzhash_.roll(h, ring_[ring_pos_], in);
      break;
    }
  }
  ring_[ring_pos_] = in;
  if (++ring_pos_ == window_) ring_pos_ = 0;
  ++pushed_;
}

}  // namespace cdc
