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

#include "cdc/analysis.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace cdc {

bool FingerprintIndex::ingest(const ChunkRecord& record) {
  if (record.trailing) {
    throw Error(ErrorCode::kDomain, "trailing chunks are not indexed");
  }
  if (!record.has_fingerprint) {
    throw Error(ErrorCode::kDomain, "record has no fingerprint");
  }
  bytes_seen_ += record.length;
  ++chunks_seen_;
  const bool fresh = sizes_.emplace(record.fingerprint, record.length).second;
  if (fresh) bytes_unique_ += record.length;
  return fresh;
}

void FingerprintIndex::merge(const FingerprintIndex& other) {
  bytes_seen_ += other.bytes_seen_;
  chunks_seen_ += other.chunks_seen_;
  for (const auto& [digest, size] : other.sizes_) {
    if (sizes_.emplace(digest, size).second) bytes_unique_ += size;
  }
}

double FingerprintIndex::dedup_ratio() const {
  if (bytes_seen_ == 0) return 0.0;
  return 1.0 - static_cast<double>(bytes_unique_) / static_cast<double>(bytes_seen_);
}

StatsSummary summarize(std::span<const ChunkRecord> records, std::uint64_t bucket_width,
                       std::uint64_t target) {
  StatsSummary s;
  if (bucket_width == 0) bucket_width = target > 0 ? std::max<std::uint64_t>(1, target / 64) : 1;
  s.histogram.bucket_width = bucket_width;

  bool all_fingerprinted = true;
  FingerprintIndex index;
  double sum = 0;
  for (const auto& r : records) {
    if (r.trailing) {
      s.trailing_omitted = true;
      continue;
    }
    if (s.chunk_count == 0) {
      s.min = s.max = r.length;
    } else {
      s.min = std::min(s.min, r.length);
      s.max = std::max(s.max, r.length);
    }
    ++s.chunk_count;
    s.total_bytes += r.length;
    sum += static_cast<double>(r.length);
    const std::uint64_t bucket = r.length / bucket_width;
    if (bucket >= s.histogram.counts.size()) s.histogram.counts.resize(bucket + 1, 0);
    ++s.histogram.counts[bucket];
    if (r.has_fingerprint) {
      index.ingest(r);
    } else {
      all_fingerprinted = false;
    }
  }
  if (s.chunk_count == 0) throw Error(ErrorCode::kEmpty, "no non-trailing chunks to summarize");

  s.mean = sum / static_cast<double>(s.chunk_count);
  double sq = 0;
  for (const auto& r : records) {
    if (r.trailing) continue;
    const double d = static_cast<double>(r.length) - s.mean;
    sq += d * d;
  }
  s.sd = std::sqrt(sq / static_cast<double>(s.chunk_count));
  if (all_fingerprinted) {
    s.dedup_ratio = index.dedup_ratio();
    s.unique_bytes = index.bytes_unique();
  }
  return s;
}

double quantile(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw Error(ErrorCode::kEmpty, "quantile of empty sample");
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

namespace {

std::uint64_t chunk_pass(ChunkStream& stream, std::span<const std::uint8_t> input,
                         std::size_t block_size) {
  std::uint64_t sum = 0;
  std::uint64_t last = 0;
  for (std::size_t off = 0; off < input.size(); off += block_size) {
    const auto block = input.subspan(off, std::min(block_size, input.size() - off));
    stream.push_boundaries(block, [&](std::uint64_t end) {
      sum += end - last;
      last = end;
    });
  }
  return sum + stream.finalize().length;
}

}  // namespace

ThroughputReport throughput_run(const ChunkerSpec& spec, std::span<const std::uint8_t> input,
                                std::uint32_t repetitions, std::size_t block_size) {
  if (repetitions < 1) throw Error(ErrorCode::kConfig, "throughput: repetitions must be >= 1");
  if (block_size == 0) throw Error(ErrorCode::kConfig, "throughput: block size must be > 0");
  if (input.empty()) throw Error(ErrorCode::kEmpty, "throughput: input is empty");
  spec.validate();

  ThroughputReport report;
  report.repetitions = repetitions;
  report.input_bytes = input.size();

  {
    ChunkStream warmup(spec);
    report.sum_of_sizes = chunk_pass(warmup, input, block_size);
  }

  const double mib = static_cast<double>(input.size()) / (1024.0 * 1024.0);
  for (std::uint32_t i = 0; i < repetitions; ++i) {
    ChunkStream stream(spec);
    const auto start = std::chrono::steady_clock::now();
    const std::uint64_t sum = chunk_pass(stream, input, block_size);
    const auto stop = std::chrono::steady_clock::now();
    if (sum != report.sum_of_sizes) {
      throw Error(ErrorCode::kState, "throughput: passes disagree on the sum of chunk sizes");
    }
    const double secs = std::chrono::duration<double>(stop - start).count();
    report.samples_mibps.push_back(secs > 0 ? mib / secs : 0.0);
  }
  std::vector<double> sorted = report.samples_mibps;
  std::sort(sorted.begin(), sorted.end());
  report.median_mibps = quantile(sorted, 0.5);
  report.iqr_mibps = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  return report;
}

}  // namespace cdc
