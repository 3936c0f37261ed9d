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

#ifndef CDC_ANALYSIS_HPP_
#define CDC_ANALYSIS_HPP_

#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "cdc/core.hpp"

namespace cdc {

inline constexpr const char* kFingerprintAlgorithm = "sha-256";

struct DigestHash {
  std::size_t operator()(const Digest& d) const noexcept {
    std::size_t h;
    static_assert(sizeof(h) <= sizeof(Digest));
    std::memcpy(&h, d.data(), sizeof(h));
    return h;
  }
};

// Set of distinct chunk fingerprints with running byte totals.
class FingerprintIndex {
 public:
  // Records must be fingerprinted and non-trailing. Returns true if the
  // fingerprint was new.
  bool ingest(const ChunkRecord& record);

  // Folds another index into this one. The totals equal those of a single
  // index fed both record streams, in any order.
  void merge(const FingerprintIndex& other);

  std::uint64_t bytes_seen() const { return bytes_seen_; }
  std::uint64_t bytes_unique() const { return bytes_unique_; }
  std::uint64_t chunks_seen() const { return chunks_seen_; }
  std::size_t unique_chunks() const { return sizes_.size(); }

  // 1 - unique / seen; 0 for an empty index.
  double dedup_ratio() const;

 private:
  std::unordered_map<Digest, std::uint64_t, DigestHash> sizes_;
  std::uint64_t bytes_seen_ = 0;
  std::uint64_t bytes_unique_ = 0;
  std::uint64_t chunks_seen_ = 0;
};

struct Histogram {
  std::uint64_t bucket_width = 0;
  // counts[i] covers lengths in [i * width, (i + 1) * width).
  std::vector<std::uint64_t> counts;
};

struct StatsSummary {
  std::uint64_t chunk_count = 0;
  std::uint64_t total_bytes = 0;
  double mean = 0;
  double sd = 0;  // population
  std::uint64_t min = 0;
  std::uint64_t max = 0;
  Histogram histogram;
  // Present when every counted record carries a fingerprint.
  std::optional<double> dedup_ratio;
  std::uint64_t unique_bytes = 0;
  bool trailing_omitted = false;
};

// Statistics over the non-trailing records. Throws Error(kEmpty) when there
// are none. bucket_width 0 selects max(1, target / 64) if target > 0, else 1.
StatsSummary summarize(std::span<const ChunkRecord> records, std::uint64_t bucket_width,
                       std::uint64_t target = 0);

struct ThroughputReport {
  std::uint32_t repetitions = 0;
  double median_mibps = 0;
  double iqr_mibps = 0;
  std::uint64_t sum_of_sizes = 0;
  std::uint64_t input_bytes = 0;
  std::vector<double> samples_mibps;
};

// Linear-interpolation quantile of an ascending sample.
double quantile(std::span<const double> sorted, double q);

// Times `repetitions` chunking passes over an in-memory buffer after one
// untimed warm-up. Only boundary detection runs inside the timed region; the
// sole output of each pass is the sum of chunk sizes. Throws Error(kEmpty) for
// an empty input.
ThroughputReport throughput_run(const ChunkerSpec& spec, std::span<const std::uint8_t> input,
                                std::uint32_t repetitions, std::size_t block_size = 1 << 20);

}  // namespace cdc

#endif  // CDC_ANALYSIS_HPP_
