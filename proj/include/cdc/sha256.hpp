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

#ifndef CDC_SHA256_HPP_
#define CDC_SHA256_HPP_

#include <array>
#include <cstdint>
#include <span>
#include <string>

namespace cdc {

using Digest = std::array<std::uint8_t, 32>;

// Incremental SHA-256 over OpenSSL's EVP interface.
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::span<const std::uint8_t> data);
  // Returns the digest and re-arms the context for the next message.
  Digest finish();

 private:
  void* ctx_;  // EVP_MD_CTX
};

Digest sha256(std::span<const std::uint8_t> data);

// Lowercase hex.
std::string to_hex(const Digest& digest);

}  // namespace cdc

#endif  // CDC_SHA256_HPP_
