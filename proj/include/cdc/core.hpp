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

#ifndef CDC_CORE_HPP_
#define CDC_CORE_HPP_

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "cdc/sha256.hpp"

namespace cdc {

enum class ErrorCode {
  kConfig = 1,    // invalid or inconsistent parameters
  kIo = 2,        // unreadable input, failed write
  kTuning = 3,    // no parameterization reaches the target
  kDomain = 4,    // argument outside a function's domain
  kState = 5,     // contract violation (e.g. push after finalize)
  kEmpty = 6,     // operation needs data that is not there
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class Algorithm {
  kFsc,
  kBswRabin,
  kBswBuzhash,
  kBswGear,
  kGearNc,
  kAe,
  kRam,
  kMii,
  kPci,
  kBfbc,
  kBfbcStar,
};

inline constexpr std::array<Algorithm, 11> kAllAlgorithms = {
    Algorithm::kFsc,    Algorithm::kBswRabin, Algorithm::kBswBuzhash,
    Algorithm::kBswGear, Algorithm::kGearNc,  Algorithm::kAe,
    Algorithm::kRam,    Algorithm::kMii,      Algorithm::kPci,
    Algorithm::kBfbc,   Algorithm::kBfbcStar,
};

// Canonical lowercase name ("fsc", "rabin", "gear-nc", "bfbc-star", ...).
std::string_view algorithm_name(Algorithm alg);
// Accepts canonical names and a few aliases; throws Error(kConfig).
Algorithm parse_algorithm(std::string_view name);

class DivisorSet;

inline constexpr std::uint64_t kDefaultTableSeed = 0x243F6A8885A308D3ULL;
inline constexpr std::uint64_t kMinTargetSize = 64;
inline constexpr std::uint64_t kMaxTargetSize = std::uint64_t{1} << 30;

// Algorithm-specific knobs. Only the fields relevant to the chosen algorithm
// may be set; ChunkerSpec::validate() enforces this.
struct ChunkerParams {
  std::optional<std::uint32_t> window;      // w: BSW, MII, PCI
  std::optional<std::uint32_t> mask_bits;   // b: BSW, Gear, Gear NC
  std::optional<std::uint64_t> horizon;     // h: AE, RAM
  std::optional<std::uint32_t> threshold;   // theta: PCI
  std::optional<std::uint32_t> nc_level;    // x in {1,2,3}: Gear NC
  std::optional<std::uint64_t> min_chunk;   // lambda_min: BFBC, BFBC*
  std::optional<std::uint64_t> fixed_size;  // FSC
  std::optional<std::uint32_t> hash_width;  // 32 or 64: Gear, Gear NC
  std::shared_ptr<const DivisorSet> divisors;
};

struct ChunkerSpec {
  Algorithm algorithm = Algorithm::kFsc;
  std::uint64_t target_size = 0;  // mu
  ChunkerParams params;
  std::uint64_t table_seed = kDefaultTableSeed;

  // Throws Error(kConfig) describing the first violated invariant.
  void validate() const;
};

struct ChunkRecord {
  std::uint64_t ordinal = 0;
  std::uint64_t length = 0;
  // Absolute end offset in the stream (the boundary position).
  std::uint64_t end = 0;
  Digest fingerprint{};
  bool has_fingerprint = false;
  bool trailing = false;
};

// Boundary detector for one algorithm. Implementations keep their own
// per-chunk state and reset it after reporting a cut-point.
class BoundaryDetector {
 public:
  virtual ~BoundaryDetector() = default;

  // Consumes bytes of `block` up to and including the first cut-point and
  // returns its 1-based index in `block`. Returns 0 if the whole block was
  // consumed without a cut-point.
  virtual std::size_t scan(std::span<const std::uint8_t> block) = 0;

  // Drops all per-chunk state.
  virtual void reset() = 0;
};

std::unique_ptr<BoundaryDetector> make_detector(const ChunkerSpec& spec);

enum class FingerprintMode { kNone, kSha256 };

// Incremental chunker. Boundaries are reported as absolute positions p, where
// the chunk ends with the p-th byte of the stream (1-indexed), so p is also
// the exclusive end offset.
class ChunkStream {
 public:
  explicit ChunkStream(const ChunkerSpec& spec,
                       FingerprintMode mode = FingerprintMode::kNone);
  ChunkStream(ChunkStream&&) noexcept;
  ChunkStream& operator=(ChunkStream&&) noexcept;
  ~ChunkStream();

  std::vector<std::uint64_t> push_block(std::span<const std::uint8_t> block);

  // Appends one record per completed chunk to `out`.
  void push_block(std::span<const std::uint8_t> block,
                  std::vector<ChunkRecord>& out);

  // Emits the bytes after the last boundary as the trailing chunk (length may
  // be zero). The stream cannot be used afterwards.
  ChunkRecord finalize();

  const ChunkerSpec& spec() const { return spec_; }
  std::uint64_t bytes_consumed() const { return consumed_; }
  std::uint64_t chunks_emitted() const { return emitted_; }
  bool finalized() const { return finalized_; }

  // Visits every completed chunk's boundary. Used by the throughput driver,
  // which must not pay for record construction.
  template <typename OnBoundary>
  void push_boundaries(std::span<const std::uint8_t> block, OnBoundary&& fn) {
    check_open();
    while (!block.empty()) {
      const std::size_t k = detector_->scan(block);
      if (k == 0) {
        consumed_ += block.size();
        return;
      }
      consumed_ += k;
      chunk_start_ = consumed_;
      ++emitted_;
      fn(consumed_);
      block = block.subspan(k);
    }
  }

 private:
  void check_open() const;

  ChunkerSpec spec_;
  FingerprintMode mode_;
  std::unique_ptr<BoundaryDetector> detector_;
  std::unique_ptr<Sha256> hasher_;
  std::uint64_t consumed_ = 0;
  std::uint64_t chunk_start_ = 0;
  std::uint64_t emitted_ = 0;
  bool finalized_ = false;
};

// Convenience: runs a whole buffer through a fresh stream.
std::vector<ChunkRecord> chunk_buffer(const ChunkerSpec& spec,
                                      std::span<const std::uint8_t> data,
                                      FingerprintMode mode,
                                      std::size_t block_size = 1 << 20);

// Boundary positions of a single-shot run (no trailing chunk).
std::vector<std::uint64_t> boundaries_of(const ChunkerSpec& spec,
                                         std::span<const std::uint8_t> data);

}  // namespace cdc

#endif  // CDC_CORE_HPP_
