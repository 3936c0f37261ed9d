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

#ifndef CDC_CHUNKERS_HPP_
#define CDC_CHUNKERS_HPP_

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "cdc/core.hpp"
#include "cdc/rolling_hash.hpp"

namespace cdc {

// A byte pair (d[i-1], d[i]) packed as (first << 8) | second.
using BytePair = std::uint16_t;

constexpr BytePair make_pair_key(std::uint8_t first, std::uint8_t second) {
  return static_cast<BytePair>((first << 8) | second);
}

struct PairCount {
  BytePair pair = 0;
  std::uint64_t count = 0;
  bool operator==(const PairCount&) const = default;
};

// BFBC divisors: an 8 KiB bitset over all 65536 byte pairs plus the frequency
// list the members were picked from.
class DivisorSet {
 public:
  // `chosen` holds indices into `frequencies`. Every chosen entry must have a
  // non-zero count; an empty selection is rejected.
  DivisorSet(std::vector<PairCount> frequencies, std::vector<std::size_t> chosen);

  bool contains(BytePair pair) const {
    return (bits_[pair >> 6] >> (pair & 63)) & 1U;
  }
  bool contains(std::uint8_t first, std::uint8_t second) const {
    return contains(make_pair_key(first, second));
  }

  std::size_t size() const { return chosen_.size(); }
  const std::vector<PairCount>& source_frequencies() const { return frequencies_; }
  const std::vector<std::size_t>& chosen() const { return chosen_; }
  std::vector<BytePair> pairs() const;

 private:
  std::array<std::uint64_t, 1024> bits_{};
  std::vector<PairCount> frequencies_;
  std::vector<std::size_t> chosen_;
};

// The first k entries of a descending frequency list (BFBC's top-k rule).
std::shared_ptr<const DivisorSet> top_k_divisors(std::vector<PairCount> frequencies,
                                                 std::size_t k);

struct NcPolicy {
  std::uint32_t base_bits = 0;
  std::uint32_t level = 0;
  std::uint64_t switch_point = 0;

  std::uint32_t bits_before() const { return base_bits + level; }
  std::uint32_t bits_after() const { return base_bits - level; }
  std::uint32_t bits_at(std::uint64_t chunk_len) const {
    return chunk_len < switch_point ? bits_before() : bits_after();
  }
};

// round(log2(x)), exact .5 ties resolved downwards.
std::uint32_t round_log2(double x);

namespace detail {

inline constexpr std::array<std::uint8_t, 256> kBytePopcount = [] {
  std::array<std::uint8_t, 256> t{};
  for (int i = 0; i < 256; ++i) t[i] = static_cast<std::uint8_t>(std::popcount(static_cast<unsigned>(i)));
  return t;
}();

// Shared scan loop: feeds next() until it reports a cut-point.
template <typename Derived>
class ByteLoopDetector : public BoundaryDetector {
 public:
  std::size_t scan(std::span<const std::uint8_t> block) override {
    auto& self = static_cast<Derived&>(*this);
    const std::uint8_t* p = block.data();
    const std::size_t n = block.size();
    for (std::size_t k = 0; k < n; ++k) {
      if (self.next(p[k])) return k + 1;
    }
    return 0;
  }
};

}  // namespace detail

// Each detector's next() consumes one byte, returns true when that byte ends
// a chunk, and resets itself in that case. Positions are 1-based within the
// current chunk.

class FscDetector final : public detail::ByteLoopDetector<FscDetector> {
 public:
  explicit FscDetector(std::uint64_t fixed_size);

  bool next(std::uint8_t) {
    if (++pos_ == fixed_) {
      pos_ = 0;
      return true;
    }
    return false;
  }
  std::size_t scan(std::span<const std::uint8_t> block) override;
  void reset() override { pos_ = 0; }

 private:
  std::uint64_t fixed_;
  std::uint64_t pos_ = 0;
};

// Rolling-window detectors. Derived supplies fill(h, in) for the first w
// bytes of a chunk, roll(h, out, in) afterwards and hit(h) as the cut test.
// Once a block holds a full window the outgoing byte is read from the block
// itself and the ring is only refreshed when the block ends without a cut.
template <typename Derived, typename Hash>
class WindowedDetector : public BoundaryDetector {
 public:
  explicit WindowedDetector(std::uint32_t window) : window_(window), ring_(window, 0) {}

  bool next(std::uint8_t b) {
    auto& self = static_cast<Derived&>(*this);
    if (pos_ < window_) {
      hash_ = self.fill(hash_, b);
      ring_[pos_] = b;
      if (++pos_ < window_) return false;
      slot_ = 0;
    } else {
      hash_ = self.roll(hash_, ring_[slot_], b);
      ring_[slot_] = b;
      if (++slot_ == window_) slot_ = 0;
      ++pos_;
    }
    if (self.hit(hash_)) {
      reset();
      return true;
    }
    return false;
  }

  std::size_t scan(std::span<const std::uint8_t> block) override {
    auto& self = static_cast<Derived&>(*this);
    const std::uint8_t* p = block.data();
    const std::size_t n = block.size();
    std::size_t k = 0;
    for (; k < n && (pos_ < window_ || k < window_); ++k) {
      if (next(p[k])) return k + 1;
    }
    if (k == n) return 0;
    const std::size_t start = k;
    Hash h = hash_;
    for (; k < n; ++k) {
      h = self.roll(h, p[k - window_], p[k]);
      if (self.hit(h)) {
        reset();
        return k + 1;
      }
    }
    hash_ = h;
    pos_ += n - start;
    std::copy(p + n - window_, p + n, ring_.begin());
    slot_ = 0;
    return 0;
  }

  void reset() override { hash_ = 0; pos_ = 0; slot_ = 0; }

 private:
  std::uint32_t window_;
  std::vector<std::uint8_t> ring_;
  Hash hash_ = 0;
  std::uint64_t pos_ = 0;
  std::uint32_t slot_ = 0;
};

class RabinDetector final : public WindowedDetector<RabinDetector, std::uint64_t> {
 public:
  RabinDetector(std::uint32_t window, std::uint32_t mask_bits);

  std::uint64_t fill(std::uint64_t h, std::uint8_t in) const {
    return h * RabinHash::kBase + in;
  }
  std::uint64_t roll(std::uint64_t h, std::uint8_t out, std::uint8_t in) const {
    return rabin_.roll(h, out, in);
  }
  bool hit(std::uint64_t h) const { return (h & mask_) == 0; }

 private:
  RabinHash rabin_;
  std::uint64_t mask_;
};

class BuzhashDetector final : public WindowedDetector<BuzhashDetector, std::uint32_t> {
 public:
  BuzhashDetector(std::uint32_t window, std::uint32_t mask_bits,
                  const ByteTable& table);

  std::uint32_t fill(std::uint32_t h, std::uint8_t in) const { return buz_.append(h, in); }
  std::uint32_t roll(std::uint32_t h, std::uint8_t out, std::uint8_t in) const {
    return buz_.roll(h, out, in);
  }
  bool hit(std::uint32_t h) const { return (h & mask_) == 0; }

 private:
  Buzhash buz_;
  std::uint32_t mask_;
};

// Gear tests the most significant bits, since the shift pushes the oldest
// bytes' influence out through the top of the word.
template <typename Word>
constexpr Word top_bits_mask(std::uint32_t bits) {
  constexpr std::uint32_t kWidth = sizeof(Word) * 8;
  return bits == 0 ? Word{0} : static_cast<Word>(~Word{0} << (kWidth - bits));
}

template <typename Word>
class GearDetector final : public detail::ByteLoopDetector<GearDetector<Word>> {
 public:
  GearDetector(std::uint32_t mask_bits, const std::array<Word, 256>& table)
      : table_(table), mask_(top_bits_mask<Word>(mask_bits)) {}

  bool next(std::uint8_t b) {
    hash_ = static_cast<Word>((hash_ << 1) + table_[b]);
    if ((hash_ & mask_) == 0) {
      hash_ = 0;
      return true;
    }
    return false;
  }
  void reset() override { hash_ = 0; }

 private:
  std::array<Word, 256> table_;
  Word mask_;
  Word hash_ = 0;
};

// Gear with normalised chunking: b+x mask bits while the chunk is shorter
// than the switch point, b-x bits afterwards.
template <typename Word>
class GearNcDetector final
    : public detail::ByteLoopDetector<GearNcDetector<Word>> {
 public:
  GearNcDetector(const NcPolicy& policy, const std::array<Word, 256>& table)
      : table_(table),
        switch_point_(policy.switch_point),
        strict_(top_bits_mask<Word>(policy.bits_before())),
        loose_(top_bits_mask<Word>(policy.bits_after())) {}

  bool next(std::uint8_t b) {
    hash_ = static_cast<Word>((hash_ << 1) + table_[b]);
    ++pos_;
    const Word mask = pos_ < switch_point_ ? strict_ : loose_;
    if ((hash_ & mask) == 0) {
      reset();
      return true;
    }
    return false;
  }
  void reset() override { hash_ = 0; pos_ = 0; }

 private:
  std::array<Word, 256> table_;
  std::uint64_t switch_point_;
  Word strict_;
  Word loose_;
  Word hash_ = 0;
  std::uint64_t pos_ = 0;
};

// Asymmetric extremum: cut h bytes after the running maximum if none of
// those bytes exceeded it. The first byte of a chunk always becomes the
// initial maximum.
class AeDetector final : public detail::ByteLoopDetector<AeDetector> {
 public:
  explicit AeDetector(std::uint64_t horizon);

  bool next(std::uint8_t b) {
    ++pos_;
    if (static_cast<int>(b) <= max_val_) {
      if (pos_ == max_pos_ + horizon_) {
        reset();
        return true;
      }
    } else {
      max_val_ = b;
      max_pos_ = pos_;
    }
    return false;
  }
  void reset() override { max_val_ = -1; max_pos_ = 0; pos_ = 0; }

 private:
  std::uint64_t horizon_;
  int max_val_ = -1;
  std::uint64_t max_pos_ = 0;
  std::uint64_t pos_ = 0;
};

// Rapid asymmetric extremum: maximum over the first h bytes, then cut at the
// first byte that reaches it.
class RamDetector final : public detail::ByteLoopDetector<RamDetector> {
 public:
  explicit RamDetector(std::uint64_t horizon);

  bool next(std::uint8_t b) {
    if (pos_ < horizon_) {
      ++pos_;
      if (b > max_) max_ = b;
      return false;
    }
    if (b >= max_) {
      reset();
      return true;
    }
    ++pos_;
    return false;
  }
  std::size_t scan(std::span<const std::uint8_t> block) override;
  void reset() override { max_ = 0; pos_ = 0; }

 private:
  std::uint64_t horizon_;
  std::uint8_t max_ = 0;
  std::uint64_t pos_ = 0;
};

// Minimal incremental interval: cut at the end of a run of w strictly
// ascending bytes. The run restarts at the first byte of every chunk.
class MiiDetector final : public detail::ByteLoopDetector<MiiDetector> {
 public:
  explicit MiiDetector(std::uint32_t window);

  bool next(std::uint8_t b) {
    run_ = (run_ != 0 && b > prev_) ? run_ + 1 : 1;
    prev_ = b;
    if (run_ == window_) {
      reset();
      return true;
    }
    return false;
  }
  void reset() override { run_ = 0; prev_ = 0; }

 private:
  std::uint32_t window_;
  std::uint32_t run_ = 0;
  std::uint8_t prev_ = 0;
};

// Parity check of interval: rolling popcount over w bytes, cut once the
// window is full and the count reaches theta.
class PciDetector final : public detail::ByteLoopDetector<PciDetector> {
 public:
  PciDetector(std::uint32_t window, std::uint32_t threshold);

  bool next(std::uint8_t b) {
    ++pos_;
    popcount_ += detail::kBytePopcount[b];
    popcount_ -= detail::kBytePopcount[ring_[slot_]];
    ring_[slot_] = b;
    if (++slot_ == window_) slot_ = 0;
    if (pos_ >= window_ && popcount_ >= threshold_) {
      reset();
      return true;
    }
    return false;
  }
  void reset() override;

  std::uint32_t popcount() const { return popcount_; }

 private:
  std::uint32_t window_;
  std::uint32_t threshold_;
  std::vector<std::uint8_t> ring_;
  std::uint32_t slot_ = 0;
  std::uint32_t popcount_ = 0;
  std::uint64_t pos_ = 0;
};

// Bytes-frequency based chunking: past lambda_min, cut at the second byte of
// any divisor pair. Both bytes of the pair must belong to the current chunk.
class BfbcDetector final : public detail::ByteLoopDetector<BfbcDetector> {
 public:
  BfbcDetector(std::shared_ptr<const DivisorSet> divisors, std::uint64_t min_chunk);

  bool next(std::uint8_t b) {
    ++pos_;
    if (pos_ >= 2 && pos_ > min_chunk_ && divisors_->contains(prev_, b)) {
      reset();
      return true;
    }
    prev_ = b;
    return false;
  }
  std::size_t scan(std::span<const std::uint8_t> block) override;
  void reset() override { pos_ = 0; prev_ = 0; }

 private:
  std::shared_ptr<const DivisorSet> divisors_;
  std::uint64_t min_chunk_;
  std::uint64_t pos_ = 0;
  std::uint8_t prev_ = 0;
};

// Smallest chunk (excluding the trailing one) the algorithm can emit.
std::uint64_t minimum_chunk_length(const ChunkerSpec& spec);

}  // namespace cdc

#endif  // CDC_CHUNKERS_HPP_
