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


#include "cdc/cdc.h"

#include <algorithm>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <string>
#include <string_view>
#include <vector>

#include "cdc/analysis.hpp"
#include "cdc/core.hpp"
#include "cdc/datasets.hpp"
#include "cdc/io.hpp"
#include "cdc/sha256.hpp"
#include "cdc/tuning.hpp"

struct cdc_spec {
  cdc::ResolvedSpec resolved;
};

struct cdc_stream {
  explicit cdc_stream(const cdc::ChunkerSpec& spec, cdc::FingerprintMode mode)
      : stream(spec, mode) {}
  cdc::ChunkStream stream;
  std::vector<cdc::ChunkRecord> scratch;
};

struct cdc_index {
  cdc::FingerprintIndex index;
};

namespace {

thread_local std::string g_last_error;

struct InvalidArgument {
  const char* what;
};

cdc_status map_code(cdc::ErrorCode code) {
  switch (code) {
    case cdc::ErrorCode::kConfig: return CDC_ERR_CONFIG;
    case cdc::ErrorCode::kIo: return CDC_ERR_IO;
    case cdc::ErrorCode::kTuning: return CDC_ERR_TUNING;
    case cdc::ErrorCode::kDomain: return CDC_ERR_DOMAIN;
    case cdc::ErrorCode::kState: return CDC_ERR_STATE;
    case cdc::ErrorCode::kEmpty: return CDC_ERR_EMPTY;
  }
  return CDC_ERR_INTERNAL;
}

template <typename F>
cdc_status guarded(F&& body) {
  try {
    body();
    g_last_error.clear();
    return CDC_OK;
  } catch (const InvalidArgument& e) {
    g_last_error = e.what;
    return CDC_ERR_INVALID_ARGUMENT;
  } catch (const cdc::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CDC_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CDC_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return CDC_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument{what};
}

template <typename T>
T* malloc_array(std::size_t n) {
  void* p = std::malloc(std::max<std::size_t>(n, 1) * sizeof(T));
  if (p == nullptr) throw std::bad_alloc();
  return static_cast<T*>(p);
}

char* dup_string(const std::string& s) {
  char* p = malloc_array<char>(s.size() + 1);
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

std::span<const std::uint8_t> bytes(const std::uint8_t* data, std::size_t len) {
  require(data != nullptr || len == 0, "null data with nonzero length");
  return {data, len};
}

cdc_chunk to_c(const cdc::ChunkRecord& r) {
  cdc_chunk c{};
  c.ordinal = r.ordinal;
  c.length = r.length;
  c.end = r.end;
  std::memcpy(c.fingerprint, r.fingerprint.data(), r.fingerprint.size());
  c.has_fingerprint = r.has_fingerprint ? 1 : 0;
  c.trailing = r.trailing ? 1 : 0;
  return c;
}

cdc::ChunkRecord from_c(const cdc_chunk& c) {
  cdc::ChunkRecord r;
  r.ordinal = c.ordinal;
  r.length = c.length;
  r.end = c.end;
  std::memcpy(r.fingerprint.data(), c.fingerprint, r.fingerprint.size());
  r.has_fingerprint = c.has_fingerprint != 0;
  r.trailing = c.trailing != 0;
  return r;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

cdc::Overrides parse_overrides(const char* text) {
  cdc::Overrides out;
  if (text == nullptr) return out;
  std::string_view rest(text);
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = trim(rest.substr(0, comma));
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw cdc::Error(cdc::ErrorCode::kConfig,
                       "override '" + std::string(item) + "' is not key=value");
    }
    const std::string key(trim(item.substr(0, eq)));
    if (out.count(key) != 0) {
      throw cdc::Error(cdc::ErrorCode::kConfig, "override '" + key + "' given twice");
    }
    out[key] = std::string(trim(item.substr(eq + 1)));
  }
  return out;
}

cdc::PciTuneOptions pci_options(const cdc_pci_options* o) {
  cdc::PciTuneOptions opt;
  if (o == nullptr) return opt;
  if (o->sim_len != 0) opt.sim_len = o->sim_len;
  opt.seed = o->seed;
  opt.full_grid = o->full_grid != 0;
  opt.threads = o->threads;
  opt.simulate = o->simulate != 0;
  return opt;
}

}  // namespace

extern "C" {

const char* cdc_version(void) { return CDC_VERSION_STRING; }

const char* cdc_last_error(void) { return g_last_error.c_str(); }

void cdc_free(void* p) { std::free(p); }

cdc_status cdc_spec_resolve(const char* algorithm, uint64_t target, const char* overrides,
                            const uint8_t* sample, size_t sample_len,
                            const cdc_pci_options* pci, cdc_spec** out) {
  return guarded([&] {
    require(algorithm != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    const cdc::Algorithm alg = cdc::parse_algorithm(algorithm);
    auto spec = std::make_unique<cdc_spec>();
    spec->resolved = cdc::resolve_spec(alg, target, parse_overrides(overrides),
                                       bytes(sample, sample_len), pci_options(pci));
    *out = spec.release();
  });
}

void cdc_spec_destroy(cdc_spec* spec) { delete spec; }

cdc_status cdc_spec_json(const cdc_spec* spec, char** out_json) {
  return guarded([&] {
    require(spec != nullptr && out_json != nullptr, "null argument");
    *out_json = dup_string(cdc::resolved_to_json(spec->resolved).dump());
  });
}

cdc_status cdc_stream_create(const cdc_spec* spec, int fingerprint, cdc_stream** out) {
  return guarded([&] {
    require(spec != nullptr && out != nullptr, "null argument");
    *out = nullptr;
    *out = new cdc_stream(spec->resolved.spec, fingerprint != 0
                                                   ? cdc::FingerprintMode::kSha256
                                                   : cdc::FingerprintMode::kNone);
  });
}

void cdc_stream_destroy(cdc_stream* stream) { delete stream; }

cdc_status cdc_stream_push(cdc_stream* stream, const uint8_t* data, size_t len,
                           cdc_chunk_fn fn, void* ctx) {
  return guarded([&] {
    require(stream != nullptr, "null stream");
    stream->scratch.clear();
    stream->stream.push_block(bytes(data, len), stream->scratch);
    if (fn == nullptr) return;
    for (const auto& r : stream->scratch) {
      const cdc_chunk c = to_c(r);
      fn(ctx, &c);
    }
  });
}

cdc_status cdc_stream_finalize(cdc_stream* stream, cdc_chunk* trailing) {
  return guarded([&] {
    require(stream != nullptr, "null stream");
    const cdc::ChunkRecord r = stream->stream.finalize();
    if (trailing != nullptr) *trailing = to_c(r);
  });
}

uint64_t cdc_stream_bytes_consumed(const cdc_stream* stream) {
  return stream == nullptr ? 0 : stream->stream.bytes_consumed();
}

uint64_t cdc_stream_chunks_emitted(const cdc_stream* stream) {
  return stream == nullptr ? 0 : stream->stream.chunks_emitted();
}

cdc_status cdc_mh_cdf(uint64_t h, int m, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = cdc::mh_cdf(h, m);
  });
}

cdc_status cdc_mh_pmf(uint64_t h, int m, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = cdc::mh_pmf(h, m);
  });
}

cdc_status cdc_mh_pmf_conditioned(uint64_t h, int m, int x, double* out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = cdc::mh_pmf_conditioned(h, m, x);
  });
}

cdc_status cdc_ae_h_for_target(uint64_t target, uint64_t* h, int* approximate) {
  return guarded([&] {
    require(h != nullptr, "null output");
    const cdc::AeHorizon r = cdc::ae_h_for_target(target);
    *h = r.horizon;
    if (approximate != nullptr) *approximate = r.approximate ? 1 : 0;
  });
}

cdc_status cdc_ram_mu_of_h(uint64_t h, double* mu) {
  return guarded([&] {
    require(mu != nullptr, "null output");
    *mu = cdc::ram_mu_of_h(h);
  });
}

cdc_status cdc_ram_h_for_target(double target, uint64_t* h) {
  return guarded([&] {
    require(h != nullptr, "null output");
    *h = cdc::ram_h_for_target(target);
  });
}

cdc_status cdc_mii_mu_of_w(uint32_t w, double* mu) {
  return guarded([&] {
    require(mu != nullptr, "null output");
    *mu = cdc::mii_mu_of_w(w);
  });
}

cdc_status cdc_mii_w_for_target(double target, uint32_t* w) {
  return guarded([&] {
    require(w != nullptr, "null output");
    *w = cdc::mii_w_for_target(target);
  });
}

cdc_status cdc_pci_tune(uint64_t target, const cdc_pci_options* options, uint32_t* w,
                        uint32_t* theta, double* mean) {
  return guarded([&] {
    require(w != nullptr && theta != nullptr, "null output");
    const cdc::PciTuneResult r = cdc::pci_tune(target, pci_options(options));
    *w = r.params.window;
    *theta = r.params.threshold;
    if (mean != nullptr) *mean = r.empirical_mean;
  });
}

cdc_status cdc_index_create(cdc_index** out) {
  return guarded([&] {
    require(out != nullptr, "null output");
    *out = new cdc_index();
  });
}

void cdc_index_destroy(cdc_index* index) { delete index; }

cdc_status cdc_index_ingest(cdc_index* index, const cdc_chunk* chunk) {
  return guarded([&] {
    require(index != nullptr && chunk != nullptr, "null argument");
    index->index.ingest(from_c(*chunk));
  });
}

cdc_status cdc_index_merge(cdc_index* into, const cdc_index* from) {
  return guarded([&] {
    require(into != nullptr && from != nullptr, "null argument");
    into->index.merge(from->index);
  });
}

cdc_status cdc_index_totals(const cdc_index* index, uint64_t* bytes_seen,
                            uint64_t* bytes_unique, double* dedup_ratio) {
  return guarded([&] {
    require(index != nullptr, "null index");
    if (bytes_seen != nullptr) *bytes_seen = index->index.bytes_seen();
    if (bytes_unique != nullptr) *bytes_unique = index->index.bytes_unique();
    if (dedup_ratio != nullptr) *dedup_ratio = index->index.dedup_ratio();
  });
}

cdc_status cdc_summarize_json(const cdc_chunk* records, size_t count, uint64_t bucket_width,
                              uint64_t target, char** out_json) {
  return guarded([&] {
    require(out_json != nullptr, "null output");
    require(records != nullptr || count == 0, "null records with nonzero count");
    std::vector<cdc::ChunkRecord> rs;
    rs.reserve(count);
    for (std::size_t i = 0; i < count; ++i) rs.push_back(from_c(records[i]));
    const cdc::StatsSummary s = cdc::summarize(rs, bucket_width, target);
    *out_json = dup_string(cdc::summary_to_json(s).dump());
  });
}

cdc_status cdc_throughput_run(const cdc_spec* spec, const uint8_t* data, size_t len,
                              uint32_t repetitions, size_t block_size, cdc_throughput* out) {
  return guarded([&] {
    require(spec != nullptr && out != nullptr, "null argument");
    const cdc::ThroughputReport r = cdc::throughput_run(
        spec->resolved.spec, bytes(data, len), repetitions,
        block_size == 0 ? std::size_t{1} << 20 : block_size);
    out->median_mibps = r.median_mibps;
    out->iqr_mibps = r.iqr_mibps;
    out->repetitions = r.repetitions;
    out->sum_of_sizes = r.sum_of_sizes;
    out->input_bytes = r.input_bytes;
  });
}

cdc_status cdc_read_chunk_csv(const char* path, cdc_chunk** records, size_t* count) {
  return guarded([&] {
    require(path != nullptr && records != nullptr && count != nullptr, "null argument");
    *records = nullptr;
    *count = 0;
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cdc::Error(cdc::ErrorCode::kIo, std::string("cannot open ") + path);
    const std::vector<cdc::ChunkRecord> rs = cdc::parse_chunk_csv(in);
    cdc_chunk* arr = malloc_array<cdc_chunk>(rs.size());
    for (std::size_t i = 0; i < rs.size(); ++i) arr[i] = to_c(rs[i]);
    *records = arr;
    *count = rs.size();
  });
}

const char* cdc_random_generator(void) { return cdc::kRandomGeneratorName; }

cdc_status cdc_generate_random(uint64_t seed, uint64_t offset, uint8_t* out, size_t len) {
  return guarded([&] {
    require(out != nullptr || len == 0, "null output with nonzero length");
    cdc::fill_random(seed, offset, {out, len});
  });
}

cdc_status cdc_concat_corpus(const char* const* paths, size_t path_count, uint8_t** data,
                             size_t* len, char** manifest_json) {
  return guarded([&] {
    require(data != nullptr && len != nullptr, "null output");
    require(paths != nullptr || path_count == 0, "null paths");
    *data = nullptr;
    *len = 0;
    std::vector<std::string> ps;
    for (std::size_t i = 0; i < path_count; ++i) {
      require(paths[i] != nullptr, "null path");
      ps.emplace_back(paths[i]);
    }
    cdc::Corpus corpus = cdc::concat_corpus(ps);
    char* manifest = nullptr;
    if (manifest_json != nullptr) manifest = dup_string(cdc::manifest_to_json(corpus.manifest).dump());
    std::uint8_t* buf = nullptr;
    try {
      buf = malloc_array<std::uint8_t>(corpus.bytes.size());
    } catch (...) {
      std::free(manifest);
      throw;
    }
    if (!corpus.bytes.empty()) std::memcpy(buf, corpus.bytes.data(), corpus.bytes.size());
    *data = buf;
    *len = corpus.bytes.size();
    if (manifest_json != nullptr) *manifest_json = manifest;
  });
}

cdc_status cdc_sha256(const uint8_t* data, size_t len, uint8_t out[32]) {
  return guarded([&] {
    require(out != nullptr, "null output");
    const cdc::Digest d = cdc::sha256(bytes(data, len));
    std::memcpy(out, d.data(), d.size());
  });
}

}  // extern "C"
