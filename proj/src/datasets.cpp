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

#include "cdc/datasets.hpp"

#include <filesystem>
#include <fstream>

#include "cdc/core.hpp"
#include "cdc/random.hpp"

namespace cdc {

void fill_random(std::uint64_t seed, std::uint64_t offset, std::span<std::uint8_t> out) {
  std::size_t k = 0;
  std::uint64_t pos = offset;
  const std::size_t n = out.size();
  // Leading partial word.
  while (k < n && (pos & 7) != 0) {
    out[k++] = static_cast<std::uint8_t>(splitmix64_at(seed, pos >> 3) >> (8 * (pos & 7)));
    ++pos;
  }
  for (; k + 8 <= n; k += 8, pos += 8) {
    const std::uint64_t w = splitmix64_at(seed, pos >> 3);
    for (int i = 0; i < 8; ++i) out[k + i] = static_cast<std::uint8_t>(w >> (8 * i));
  }
  if (k < n) {
    const std::uint64_t w = splitmix64_at(seed, pos >> 3);
    for (int i = 0; k < n; ++i, ++k) out[k] = static_cast<std::uint8_t>(w >> (8 * i));
  }
}

std::vector<std::uint8_t> generate_random(std::uint64_t seed, std::uint64_t length) {
  std::vector<std::uint8_t> out(length);
  fill_random(seed, 0, out);
  return out;
}

Corpus concat_corpus(const std::vector<std::string>& paths) {
  Corpus corpus;
  for (const auto& path : paths) {
    std::error_code ec;
    if (!std::filesystem::is_regular_file(path, ec)) {
      throw Error(ErrorCode::kIo, "cannot read '" + path + "': not a regular file");
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::kIo, "cannot read '" + path + "'");
    in.seekg(0, std::ios::end);
    const std::streamoff size = in.tellg();
    if (size < 0) throw Error(ErrorCode::kIo, "cannot size '" + path + "'");
    in.seekg(0, std::ios::beg);
    const std::uint64_t offset = corpus.bytes.size();
    corpus.bytes.resize(offset + static_cast<std::uint64_t>(size));
    if (size > 0 &&
        !in.read(reinterpret_cast<char*>(corpus.bytes.data() + offset), size)) {
      throw Error(ErrorCode::kIo, "short read on '" + path + "'");
    }
    corpus.manifest.push_back({path, offset, static_cast<std::uint64_t>(size)});
  }
  return corpus;
}

}  // namespace cdc
