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

#include "cdc/core.hpp"

#include <string>
#include <utility>

#include "cdc/chunkers.hpp"

namespace cdc {
namespace {

struct NameEntry {
  std::string_view name;
  Algorithm alg;
};

// Canonical names first; later entries are aliases.
constexpr NameEntry kNames[] = {
    {"fsc", Algorithm::kFsc},
    {"rabin", Algorithm::kBswRabin},
    {"buzhash", Algorithm::kBswBuzhash},
    {"gear", Algorithm::kBswGear},
    {"gear-nc", Algorithm::kGearNc},
    {"ae", Algorithm::kAe},
    {"ram", Algorithm::kRam},
    {"mii", Algorithm::kMii},
    {"pci", Algorithm::kPci},
    {"bfbc", Algorithm::kBfbc},
    {"bfbc-star", Algorithm::kBfbcStar},
    {"bsw-rabin", Algorithm::kBswRabin},
    {"bsw-buzhash", Algorithm::kBswBuzhash},
    {"bsw-gear", Algorithm::kBswGear},
    {"bfbc*", Algorithm::kBfbcStar},
    {"bfbc_star", Algorithm::kBfbcStar},
    {"gear_nc", Algorithm::kGearNc},
};

enum Field : unsigned {
  kWindow = 1u << 0,
  kMaskBits = 1u << 1,
  kHorizon = 1u << 2,
  kThreshold = 1u << 3,
  kNcLevel = 1u << 4,
  kMinChunk = 1u << 5,
  kFixedSize = 1u << 6,
  kHashWidth = 1u << 7,
  kDivisors = 1u << 8,
};

struct FieldRule {
  unsigned required;
  unsigned optional;
};

FieldRule rule_for(Algorithm alg) {
  switch (alg) {
    case Algorithm::kFsc: return {kFixedSize, 0};
    case Algorithm::kBswRabin:
    case Algorithm::kBswBuzhash: return {kWindow | kMaskBits, 0};
    case Algorithm::kBswGear: return {kMaskBits, kHashWidth};
    case Algorithm::kGearNc: return {kMaskBits | kNcLevel, kHashWidth};
    case Algorithm::kAe:
    case Algorithm::kRam: return {kHorizon, 0};
    case Algorithm::kMii: return {kWindow, 0};
    case Algorithm::kPci: return {kWindow | kThreshold, 0};
    case Algorithm::kBfbc:
    case Algorithm::kBfbcStar: return {kDivisors | kMinChunk, 0};
  }
  return {0, 0};
}

unsigned fields_set(const ChunkerParams& p) {
  unsigned f = 0;
  if (p.window) f |= kWindow;
  if (p.mask_bits) f |= kMaskBits;
  if (p.horizon) f |= kHorizon;
  if (p.threshold) f |= kThreshold;
  if (p.nc_level) f |= kNcLevel;
  if (p.min_chunk) f |= kMinChunk;
  if (p.fixed_size) f |= kFixedSize;
  if (p.hash_width) f |= kHashWidth;
  if (p.divisors) f |= kDivisors;
  return f;
}

[[noreturn]] void config_error(Algorithm alg, const std::string& msg) {
  throw Error(ErrorCode::kConfig, std::string(algorithm_name(alg)) + ": " + msg);
}

}  // namespace

std::string_view algorithm_name(Algorithm alg) {
  for (const auto& e : kNames) {
    if (e.alg == alg) return e.name;
  }
  return "unknown";
}

Algorithm parse_algorithm(std::string_view name) {
  std::string lower(name);
  for (char& c : lower) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  for (const auto& e : kNames) {
    if (e.name == lower) return e.alg;
  }
  throw Error(ErrorCode::kConfig, "unknown algorithm '" + std::string(name) + "'");
}

void ChunkerSpec::validate() const {
  if (target_size < kMinTargetSize || target_size > kMaxTargetSize) {
    config_error(algorithm, "target size must lie in [64, 2^30]");
  }
  const FieldRule rule = rule_for(algorithm);
  const unsigned set = fields_set(params);
  if ((set & rule.required) != rule.required) {
    config_error(algorithm, "missing required parameter");
  }
  if ((set & ~(rule.required | rule.optional)) != 0) {
    config_error(algorithm, "parameter not applicable to this algorithm");
  }
  const ChunkerParams& p = params;
  const std::uint32_t width = p.hash_width.value_or(32);
  if (p.hash_width && width != 32 && width != 64) {
    config_error(algorithm, "hash width must be 32 or 64");
  }
  switch (algorithm) {
    case Algorithm::kFsc:
      if (*p.fixed_size == 0) config_error(algorithm, "fixed size must be >= 1");
      break;
    case Algorithm::kBswRabin:
    case Algorithm::kBswBuzhash: {
      const std::uint32_t limit = algorithm == Algorithm::kBswRabin ? 64 : 32;
      if (*p.window == 0) config_error(algorithm, "window must be >= 1");
      if (*p.mask_bits == 0 || *p.mask_bits > limit) {
        config_error(algorithm, "mask bits must lie in [1, " + std::to_string(limit) + "]");
      }
      break;
    }
    case Algorithm::kBswGear:
      if (*p.mask_bits == 0 || *p.mask_bits > width) {
        config_error(algorithm, "mask bits must lie in [1, hash width]");
      }
      break;
    case Algorithm::kGearNc: {
      const std::uint32_t b = *p.mask_bits;
      const std::uint32_t x = *p.nc_level;
      if (x < 1 || x > 3) config_error(algorithm, "nc level must be 1, 2 or 3");
      if (b <= x) config_error(algorithm, "mask bits minus nc level must be >= 1");
      if (b + x > width) config_error(algorithm, "mask bits plus nc level exceed hash width");
      break;
    }
    case Algorithm::kAe:
    case Algorithm::kRam:
      if (*p.horizon == 0) config_error(algorithm, "horizon must be >= 1");
      break;
    case Algorithm::kMii:
      if (*p.window < 1 || *p.window > 256) config_error(algorithm, "window must lie in [1, 256]");
      break;
    case Algorithm::kPci:
      if (*p.window == 0) config_error(algorithm, "window must be >= 1");
      if (*p.threshold > 8 * *p.window) config_error(algorithm, "threshold must lie in [0, 8w]");
      break;
    case Algorithm::kBfbc:
    case Algorithm::kBfbcStar:
      if (p.divisors->size() == 0) config_error(algorithm, "divisor set is empty");
      break;
  }
}

ChunkStream::ChunkStream(const ChunkerSpec& spec, FingerprintMode mode)
    : spec_(spec), mode_(mode), detector_(make_detector(spec)) {
  if (mode_ == FingerprintMode::kSha256) hasher_ = std::make_unique<Sha256>();
}

ChunkStream::ChunkStream(ChunkStream&&) noexcept = default;
ChunkStream& ChunkStream::operator=(ChunkStream&&) noexcept = default;
ChunkStream::~ChunkStream() = default;

void ChunkStream::check_open() const {
  if (finalized_) throw Error(ErrorCode::kState, "chunk stream already finalized");
}

std::vector<std::uint64_t> ChunkStream::push_block(std::span<const std::uint8_t> block) {
  std::vector<std::uint64_t> out;
  if (hasher_) {
    std::vector<ChunkRecord> records;
    push_block(block, records);
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.end);
    return out;
  }
  push_boundaries(block, [&out](std::uint64_t end) { out.push_back(end); });
  return out;
}

void ChunkStream::push_block(std::span<const std::uint8_t> block,
                             std::vector<ChunkRecord>& out) {
  check_open();
  while (!block.empty()) {
    const std::size_t k = detector_->scan(block);
    if (k == 0) {
      if (hasher_) hasher_->update(block);
      consumed_ += block.size();
      return;
    }
    if (hasher_) hasher_->update(block.first(k));
    consumed_ += k;
    ChunkRecord r;
    r.ordinal = emitted_;
    r.length = consumed_ - chunk_start_;
    r.end = consumed_;
    if (hasher_) {
      r.fingerprint = hasher_->finish();
      r.has_fingerprint = true;
    }
    out.push_back(r);
    chunk_start_ = consumed_;
    ++emitted_;
    block = block.subspan(k);
  }
}

ChunkRecord ChunkStream::finalize() {
  check_open();
  finalized_ = true;
  ChunkRecord r;
  r.ordinal = emitted_;
  r.length = consumed_ - chunk_start_;
  r.end = consumed_;
  r.trailing = true;
  if (hasher_) {
    r.fingerprint = hasher_->finish();
    r.has_fingerprint = true;
  }
  return r;
}

std::vector<ChunkRecord> chunk_buffer(const ChunkerSpec& spec,
                                      std::span<const std::uint8_t> data,
                                      FingerprintMode mode, std::size_t block_size) {
  if (block_size == 0) throw Error(ErrorCode::kConfig, "block size must be > 0");
  ChunkStream stream(spec, mode);
  std::vector<ChunkRecord> records;
  for (std::size_t off = 0; off < data.size(); off += block_size) {
    stream.push_block(data.subspan(off, std::min(block_size, data.size() - off)), records);
  }
  records.push_back(stream.finalize());
  return records;
}

std::vector<std::uint64_t> boundaries_of(const ChunkerSpec& spec,
                                         std::span<const std::uint8_t> data) {
  ChunkStream stream(spec);
  return stream.push_block(data);
}

}  // namespace cdc
