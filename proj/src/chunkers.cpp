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

#include "cdc/chunkers.hpp"

#include <cmath>
#include <string>

namespace cdc {

DivisorSet::DivisorSet(std::vector<PairCount> frequencies,
                       std::vector<std::size_t> chosen)
    : frequencies_(std::move(frequencies)), chosen_(std::move(chosen)) {
  if (chosen_.empty()) {
    throw Error(ErrorCode::kConfig, "divisor set is empty");
  }
  for (std::size_t idx : chosen_) {
    if (idx >= frequencies_.size()) {
      throw Error(ErrorCode::kConfig, "divisor index out of range");
    }
    if (frequencies_[idx].count == 0) {
      throw Error(ErrorCode::kConfig, "divisor pair does not occur in the source");
    }
    const BytePair p = frequencies_[idx].pair;
    bits_[p >> 6] |= std::uint64_t{1} << (p & 63);
  }
}

std::vector<BytePair> DivisorSet::pairs() const {
  std::vector<BytePair> out;
  out.reserve(chosen_.size());
  for (std::size_t idx : chosen_) out.push_back(frequencies_[idx].pair);
  return out;
}

std::shared_ptr<const DivisorSet> top_k_divisors(std::vector<PairCount> frequencies,
                                                 std::size_t k) {
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; i < frequencies.size() && chosen.size() < k; ++i) {
    if (frequencies[i].count > 0) chosen.push_back(i);
  }
  return std::make_shared<const DivisorSet>(std::move(frequencies), std::move(chosen));
}

std::uint32_t round_log2(double x) {
  if (!(x >= 1.0)) throw Error(ErrorCode::kDomain, "round_log2: argument < 1");
  const double l = std::log2(x);
  const double f = std::floor(l);
  return static_cast<std::uint32_t>(l - f > 0.5 ? f + 1 : f);
}

FscDetector::FscDetector(std::uint64_t fixed_size) : fixed_(fixed_size) {
  if (fixed_size == 0) throw Error(ErrorCode::kConfig, "fsc: fixed size must be > 0");
}

std::size_t FscDetector::scan(std::span<const std::uint8_t> block) {
  const std::uint64_t need = fixed_ - pos_;
  if (block.size() >= need) {
    pos_ = 0;
    return static_cast<std::size_t>(need);
  }
  pos_ += block.size();
  return 0;
}

RabinDetector::RabinDetector(std::uint32_t window, std::uint32_t mask_bits)
    : WindowedDetector(window),
      rabin_(window),
      mask_(mask_bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << mask_bits) - 1) {}

BuzhashDetector::BuzhashDetector(std::uint32_t window, std::uint32_t mask_bits,
                                 const ByteTable& table)
    : WindowedDetector(window),
      buz_(window, table),
      mask_(mask_bits >= 32 ? ~std::uint32_t{0} : (std::uint32_t{1} << mask_bits) - 1) {}

AeDetector::AeDetector(std::uint64_t horizon) : horizon_(horizon) {
  if (horizon == 0) throw Error(ErrorCode::kConfig, "ae: horizon must be >= 1");
}

RamDetector::RamDetector(std::uint64_t horizon) : horizon_(horizon) {
  if (horizon == 0) throw Error(ErrorCode::kConfig, "ram: horizon must be >= 1");
}

std::size_t RamDetector::scan(std::span<const std::uint8_t> block) {
  const std::uint8_t* p = block.data();
  const std::size_t n = block.size();
  std::size_t k = 0;
  if (pos_ < horizon_) {
    const std::size_t fill =
        static_cast<std::size_t>(std::min<std::uint64_t>(horizon_ - pos_, n));
    std::uint8_t m = max_;
    for (; k < fill; ++k) m = std::max(m, p[k]);
    max_ = m;
    pos_ += fill;
    if (k == n) return 0;
  }
  const std::uint8_t m = max_;
  const std::uint8_t* hit = std::find_if(p + k, p + n, [m](std::uint8_t b) { return b >= m; });
  if (hit == p + n) {
    pos_ += n - k;
    return 0;
  }
  reset();
  return static_cast<std::size_t>(hit - p) + 1;
}

MiiDetector::MiiDetector(std::uint32_t window) : window_(window) {
  if (window == 0) throw Error(ErrorCode::kConfig, "mii: window must be >= 1");
}

PciDetector::PciDetector(std::uint32_t window, std::uint32_t threshold)
    : window_(window), threshold_(threshold), ring_(window, 0) {
  if (window == 0) throw Error(ErrorCode::kConfig, "pci: window must be >= 1");
}

void PciDetector::reset() {
  std::fill(ring_.begin(), ring_.end(), std::uint8_t{0});
  slot_ = 0;
  popcount_ = 0;
  pos_ = 0;
}

BfbcDetector::BfbcDetector(std::shared_ptr<const DivisorSet> divisors,
                           std::uint64_t min_chunk)
    : divisors_(std::move(divisors)), min_chunk_(min_chunk) {
  if (!divisors_ || divisors_->size() == 0) {
    throw Error(ErrorCode::kConfig, "bfbc: divisor set is empty");
  }
}

std::size_t BfbcDetector::scan(std::span<const std::uint8_t> block) {
  const std::uint8_t* p = block.data();
  const std::size_t n = block.size();
  std::size_t k = 0;
  // Positions up to lambda_min can never cut; only the last byte matters.
  if (pos_ < min_chunk_ && n > 0) {
    const std::size_t skip =
        static_cast<std::size_t>(std::min<std::uint64_t>(min_chunk_ - pos_, n));
    pos_ += skip;
    prev_ = p[skip - 1];
    k = skip;
  }
  const DivisorSet& d = *divisors_;
  std::uint8_t prev = prev_;
  std::uint64_t pos = pos_;
  for (; k < n; ++k) {
    const std::uint8_t b = p[k];
    ++pos;
    if (pos >= 2 && d.contains(prev, b)) {
      reset();
      return k + 1;
    }
    prev = b;
  }
  prev_ = prev;
  pos_ = pos;
  return 0;
}

namespace {

std::uint32_t gear_width(const ChunkerSpec& spec) {
  return spec.params.hash_width.value_or(32);
}

}  // namespace

std::unique_ptr<BoundaryDetector> make_detector(const ChunkerSpec& spec) {
  spec.validate();
  const ChunkerParams& p = spec.params;
  switch (spec.algorithm) {
    case Algorithm::kFsc:
      return std::make_unique<FscDetector>(*p.fixed_size);
    case Algorithm::kBswRabin:
      return std::make_unique<RabinDetector>(*p.window, *p.mask_bits);
    case Algorithm::kBswBuzhash:
      return std::make_unique<BuzhashDetector>(*p.window, *p.mask_bits,
                                               make_byte_table(spec.table_seed));
    case Algorithm::kBswGear:
      if (gear_width(spec) == 64) {
        return std::make_unique<GearDetector<std::uint64_t>>(
            *p.mask_bits, make_byte_table64(spec.table_seed).entries);
      }
      return std::make_unique<GearDetector<std::uint32_t>>(
          *p.mask_bits, make_byte_table(spec.table_seed).entries);
    case Algorithm::kGearNc: {
      const NcPolicy policy{*p.mask_bits, *p.nc_level, spec.target_size};
      if (gear_width(spec) == 64) {
        return std::make_unique<GearNcDetector<std::uint64_t>>(
            policy, make_byte_table64(spec.table_seed).entries);
      }
      return std::make_unique<GearNcDetector<std::uint32_t>>(
          policy, make_byte_table(spec.table_seed).entries);
    }
    case Algorithm::kAe:
      return std::make_unique<AeDetector>(*p.horizon);
    case Algorithm::kRam:
      return std::make_unique<RamDetector>(*p.horizon);
    case Algorithm::kMii:
      return std::make_unique<MiiDetector>(*p.window);
    case Algorithm::kPci:
      return std::make_unique<PciDetector>(*p.window, *p.threshold);
    case Algorithm::kBfbc:
    case Algorithm::kBfbcStar:
      return std::make_unique<BfbcDetector>(p.divisors, *p.min_chunk);
  }
  throw Error(ErrorCode::kConfig, "unknown algorithm");
}

std::uint64_t minimum_chunk_length(const ChunkerSpec& spec) {
  const ChunkerParams& p = spec.params;
  switch (spec.algorithm) {
    case Algorithm::kFsc:
      return *p.fixed_size;
    case Algorithm::kBswRabin:
    case Algorithm::kBswBuzhash:
    case Algorithm::kPci:
      return *p.window;
    case Algorithm::kBswGear:
    case Algorithm::kGearNc:
      return 1;
    case Algorithm::kAe:
    case Algorithm::kRam:
      return *p.horizon + 1;
    case Algorithm::kMii:
      return *p.window;
    case Algorithm::kBfbc:
    case Algorithm::kBfbcStar:
      return std::max<std::uint64_t>(*p.min_chunk + 1, 2);
  }
  return 1;
}

}  // namespace cdc
