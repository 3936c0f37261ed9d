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

#ifndef CDC_DATASETS_HPP_
#define CDC_DATASETS_HPP_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cdc {

// Name recorded in output metadata for the RAND generator.
inline constexpr const char* kRandomGeneratorName = "splitmix64-counter";

// Uniform random bytes: byte j is byte (j mod 8) (little-endian) of
// splitmix64_at(seed, j / 8). Any offset can be generated independently.
void fill_random(std::uint64_t seed, std::uint64_t offset, std::span<std::uint8_t> out);
std::vector<std::uint8_t> generate_random(std::uint64_t seed, std::uint64_t length);

struct ManifestEntry {
  std::string path;
  std::uint64_t offset = 0;
  std::uint64_t size = 0;
};

struct Corpus {
  std::vector<std::uint8_t> bytes;
  std::vector<ManifestEntry> manifest;
};

// Concatenates the files in the order given, without separators. Throws
// Error(kIo) naming the first file that cannot be read.
Corpus concat_corpus(const std::vector<std::string>& paths);

}  // namespace cdc

#endif  // CDC_DATASETS_HPP_
