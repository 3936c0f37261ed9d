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

#ifndef CDC_IO_HPP_
#define CDC_IO_HPP_

#include <istream>
#include <string>
#include <vector>

#include "json.hpp"

#include "cdc/analysis.hpp"
#include "cdc/core.hpp"
#include "cdc/datasets.hpp"
#include "cdc/tuning.hpp"

namespace cdc {

nlohmann::json spec_to_json(const ChunkerSpec& spec);
nlohmann::json resolved_to_json(const ResolvedSpec& resolved);
nlohmann::json summary_to_json(const StatsSummary& summary);
nlohmann::json throughput_to_json(const ThroughputReport& report);
nlohmann::json manifest_to_json(const std::vector<ManifestEntry>& manifest);

// Chunk CSV: optional '#' comment lines, then the header
// "ordinal,size,fingerprint,trailing", then one row per chunk.
inline constexpr const char* kChunkCsvHeader = "ordinal,size,fingerprint,trailing";
std::string chunk_csv_row(const ChunkRecord& record);
// Throws Error(kIo) on malformed input.
std::vector<ChunkRecord> parse_chunk_csv(std::istream& in);

}  // namespace cdc

#endif  // CDC_IO_HPP_
