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

#include <cstdio>
#include <sstream>

#include "cdc/io.hpp"

namespace cdc {

using nlohmann::json;

namespace {

std::string pair_hex(BytePair p) {
  char buf[5];
  std::snprintf(buf, sizeof(buf), "%04x", static_cast<unsigned>(p));
  return buf;
}

bool uses_table(Algorithm alg) {
  return alg == Algorithm::kBswBuzhash || alg == Algorithm::kBswGear || alg == Algorithm::kGearNc;
}

}  // namespace

json spec_to_json(const ChunkerSpec& spec) {
  const ChunkerParams& p = spec.params;
  json params = json::object();
  if (p.window) params["window"] = *p.window;
  if (p.mask_bits) params["mask_bits"] = *p.mask_bits;
  if (p.horizon) params["horizon"] = *p.horizon;
  if (p.threshold) params["threshold"] = *p.threshold;
  if (p.nc_level) params["nc_level"] = *p.nc_level;
  if (p.min_chunk) params["min_chunk"] = *p.min_chunk;
  if (p.fixed_size) params["fixed_size"] = *p.fixed_size;
  if (p.hash_width) params["hash_width"] = *p.hash_width;
  if (p.divisors) {
    json pairs = json::array();
    json counts = json::array();
    for (std::size_t idx : p.divisors->chosen()) {
      pairs.push_back(pair_hex(p.divisors->source_frequencies()[idx].pair));
      counts.push_back(p.divisors->source_frequencies()[idx].count);
    }
    params["divisors"] = {{"count", p.divisors->size()}, {"pairs", pairs}, {"frequencies", counts}};
  }
  json j = {
      {"algorithm", std::string(algorithm_name(spec.algorithm))},
      {"target_size", spec.target_size},
      {"params", params},
  };
  if (uses_table(spec.algorithm)) j["table_seed"] = spec.table_seed;
  return j;
}

json resolved_to_json(const ResolvedSpec& resolved) {
  json j = spec_to_json(resolved.spec);
  j["provenance"] = resolved.provenance;
  j["approximate"] = resolved.approximate;
  return j;
}

json summary_to_json(const StatsSummary& s) {
  json j = {
      {"chunk_count", s.chunk_count},
      {"total_bytes", s.total_bytes},
      {"mean", s.mean},
      {"sd", s.sd},
      {"sd_kind", "population"},
      {"min", s.min},
      {"max", s.max},
      {"histogram", {{"bucket_width", s.histogram.bucket_width}, {"counts", s.histogram.counts}}},
      {"trailing_omitted", s.trailing_omitted},
  };
  if (s.dedup_ratio) {
    j["dedup_ratio"] = *s.dedup_ratio;
    j["unique_bytes"] = s.unique_bytes;
    j["fingerprint"] = kFingerprintAlgorithm;
  } else {
    j["dedup_ratio"] = nullptr;
  }
  return j;
}

json throughput_to_json(const ThroughputReport& r) {
  return {
      {"median_MiBps", r.median_mibps},
      {"iqr_MiBps", r.iqr_mibps},
      {"n", r.repetitions},
      {"sum_of_sizes", r.sum_of_sizes},
      {"input_bytes", r.input_bytes},
      {"samples_MiBps", r.samples_mibps},
  };
}

json manifest_to_json(const std::vector<ManifestEntry>& manifest) {
  json files = json::array();
  std::uint64_t total = 0;
  for (const auto& e : manifest) {
    files.push_back({{"path", e.path}, {"offset", e.offset}, {"size", e.size}});
    total += e.size;
  }
  return {{"files", files}, {"total_bytes", total}};
}

std::string chunk_csv_row(const ChunkRecord& r) {
  std::string row = std::to_string(r.ordinal);
  row += ',';
  row += std::to_string(r.length);
  row += ',';
  if (r.has_fingerprint) row += to_hex(r.fingerprint);
  row += ',';
  row += r.trailing ? '1' : '0';
  return row;
}

namespace {

int hex_value(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

[[noreturn]] void bad_csv(std::size_t line, const std::string& why) {
  throw Error(ErrorCode::kIo, "chunk csv line " + std::to_string(line) + ": " + why);
}

std::uint64_t parse_field(const std::string& s, std::size_t line) {
  if (s.empty()) bad_csv(line, "empty numeric field");
  std::uint64_t v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') bad_csv(line, "bad number '" + s + "'");
    v = v * 10 + static_cast<std::uint64_t>(c - '0');
  }
  return v;
}

}  // namespace

std::vector<ChunkRecord> parse_chunk_csv(std::istream& in) {
  std::vector<ChunkRecord> out;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = false;
  std::uint64_t end = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      if (line != kChunkCsvHeader) bad_csv(lineno, "unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    if (fields.size() != 4) bad_csv(lineno, "expected 4 fields");
    ChunkRecord r;
    r.ordinal = parse_field(fields[0], lineno);
    r.length = parse_field(fields[1], lineno);
    end += r.length;
    r.end = end;
    if (!fields[2].empty()) {
      if (fields[2].size() != 64) bad_csv(lineno, "fingerprint must be 64 hex digits");
      for (std::size_t i = 0; i < 32; ++i) {
        const int hi = hex_value(fields[2][2 * i]);
        const int lo = hex_value(fields[2][2 * i + 1]);
        if (hi < 0 || lo < 0) bad_csv(lineno, "bad hex in fingerprint");
        r.fingerprint[i] = static_cast<std::uint8_t>((hi << 4) | lo);
      }
      r.has_fingerprint = true;
    }
    if (fields[3] == "1") {
      r.trailing = true;
    } else if (fields[3] != "0") {
      bad_csv(lineno, "trailing flag must be 0 or 1");
    }
    out.push_back(r);
  }
  if (!header_seen) throw Error(ErrorCode::kIo, "chunk csv: missing header");
  return out;
}

}  // namespace cdc
