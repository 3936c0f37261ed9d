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


// Exercises the shared library through its C header only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "json.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "cdc/cdc.h"

namespace {

std::vector<uint8_t> stream_bytes(uint64_t seed, size_t n) {
  std::vector<uint8_t> d(n);
  REQUIRE(cdc_generate_random(seed, 0, d.data(), n) == CDC_OK);
  return d;
}

struct Collected {
  std::vector<cdc_chunk> chunks;
  static void push(void* ctx, const cdc_chunk* c) {
    static_cast<Collected*>(ctx)->chunks.push_back(*c);
  }
};

cdc_spec* resolve(const char* alg, uint64_t target, const char* overrides = nullptr,
                  const std::vector<uint8_t>* sample = nullptr) {
  cdc_spec* s = nullptr;
  const cdc_status st =
      cdc_spec_resolve(alg, target, overrides, sample ? sample->data() : nullptr,
                       sample ? sample->size() : 0, nullptr, &s);
  INFO(cdc_last_error());
  REQUIRE(st == CDC_OK);
  return s;
}

std::vector<cdc_chunk> run(const cdc_spec* spec, const std::vector<uint8_t>& data,
                           size_t block, int fingerprint) {
  cdc_stream* stream = nullptr;
  REQUIRE(cdc_stream_create(spec, fingerprint, &stream) == CDC_OK);
  Collected c;
  for (size_t off = 0; off < data.size(); off += block) {
    const size_t n = std::min(block, data.size() - off);
    REQUIRE(cdc_stream_push(stream, data.data() + off, n, &Collected::push, &c) == CDC_OK);
  }
  cdc_chunk t{};
  REQUIRE(cdc_stream_finalize(stream, &t) == CDC_OK);
  CHECK(t.trailing == 1);
  CHECK(cdc_stream_bytes_consumed(stream) == data.size());
  CHECK(cdc_stream_chunks_emitted(stream) == c.chunks.size());
  cdc_stream_destroy(stream);
  c.chunks.push_back(t);
  return c.chunks;
}

}  // namespace

TEST_CASE("version and generator names") {
  CHECK(std::strlen(cdc_version()) > 0);
  CHECK(std::strlen(cdc_random_generator()) > 0);
}

TEST_CASE("FSC through the C API") {
  const auto data = stream_bytes(1, 10000);
  cdc_spec* spec = resolve("fsc", 4096);
  const auto chunks = run(spec, data, 777, 1);
  REQUIRE(chunks.size() == 3);
  CHECK(chunks[0].end == 4096);
  CHECK(chunks[1].end == 8192);
  CHECK(chunks[2].length == 10000 - 8192);
  uint8_t fp[32];
  REQUIRE(cdc_sha256(data.data(), 4096, fp) == CDC_OK);
  CHECK(std::memcmp(fp, chunks[0].fingerprint, 32) == 0);
  CHECK(chunks[0].has_fingerprint == 1);
  cdc_spec_destroy(spec);
}

TEST_CASE("block sizes do not change boundaries") {
  const auto data = stream_bytes(2, 1 << 20);
  for (const char* alg : {"rabin", "buzhash", "gear", "gear-nc", "ae", "ram", "mii", "pci"}) {
    CAPTURE(alg);
    cdc_spec* spec = resolve(alg, 1024);
    const auto a = run(spec, data, 1 << 20, 0);
    const auto b = run(spec, data, 4093, 0);
    REQUIRE(a.size() == b.size());
    for (size_t i = 0; i < a.size(); ++i) CHECK(a[i].end == b[i].end);
    cdc_spec_destroy(spec);
  }
}

TEST_CASE("spec JSON and overrides") {
  cdc_spec* spec = resolve("ae", 1024, "h=500");
  char* json = nullptr;
  REQUIRE(cdc_spec_json(spec, &json) == CDC_OK);
  const auto j = nlohmann::json::parse(json);
  cdc_free(json);
  CHECK(j["algorithm"] == "ae");
  CHECK(j["params"]["horizon"] == 500);
  CHECK(j["provenance"]["horizon"] == "override");
  cdc_spec_destroy(spec);

  cdc_spec* bad = nullptr;
  CHECK(cdc_spec_resolve("ae", 1024, "nonsense", nullptr, 0, nullptr, &bad) == CDC_ERR_CONFIG);
  CHECK(std::strlen(cdc_last_error()) > 0);
  CHECK(cdc_spec_resolve("nope", 1024, nullptr, nullptr, 0, nullptr, &bad) == CDC_ERR_CONFIG);
  CHECK(cdc_spec_resolve("ae", 1024, nullptr, nullptr, 0, nullptr, nullptr) ==
        CDC_ERR_INVALID_ARGUMENT);
  CHECK(cdc_spec_resolve("bfbc", 1024, nullptr, nullptr, 0, nullptr, &bad) != CDC_OK);
  CHECK(bad == nullptr);

  const auto sample = stream_bytes(3, 1 << 16);
  cdc_spec* bfbc = resolve("bfbc", 1024, nullptr, &sample);
  cdc_spec_destroy(bfbc);
}

TEST_CASE("stream state errors") {
  cdc_spec* spec = resolve("gear", 1024);
  cdc_stream* s = nullptr;
  REQUIRE(cdc_stream_create(spec, 0, &s) == CDC_OK);
  cdc_chunk t{};
  REQUIRE(cdc_stream_finalize(s, &t) == CDC_OK);
  CHECK(t.length == 0);
  const uint8_t byte = 1;
  CHECK(cdc_stream_push(s, &byte, 1, nullptr, nullptr) == CDC_ERR_STATE);
  CHECK(cdc_stream_finalize(s, &t) == CDC_ERR_STATE);
  cdc_stream_destroy(s);
  CHECK(cdc_stream_push(nullptr, &byte, 1, nullptr, nullptr) == CDC_ERR_INVALID_ARGUMENT);
  cdc_spec_destroy(spec);
}

TEST_CASE("tuning functions") {
  double v = 0;
  REQUIRE(cdc_mh_cdf(1, 0, &v) == CDC_OK);
  CHECK(v == doctest::Approx(1.0 / 256).epsilon(1e-12));
  REQUIRE(cdc_mh_cdf(7, 255, &v) == CDC_OK);
  CHECK(v == doctest::Approx(1.0));
  REQUIRE(cdc_mh_pmf(2, 0, &v) == CDC_OK);
  CHECK(v == doctest::Approx(1.0 / 65536).epsilon(1e-12));
  REQUIRE(cdc_mh_pmf_conditioned(1, 200, 200, &v) == CDC_OK);
  CHECK(v == doctest::Approx(1.0 / 56));
  CHECK(cdc_mh_cdf(0, 0, &v) == CDC_ERR_DOMAIN);
  CHECK(cdc_mh_cdf(1, 256, &v) == CDC_ERR_DOMAIN);

  uint64_t h = 0;
  int approx = -1;
  REQUIRE(cdc_ae_h_for_target(1024, &h, &approx) == CDC_OK);
  CHECK(h == 793);
  CHECK(approx == 0);
  CHECK(cdc_ae_h_for_target(100, &h, &approx) == CDC_ERR_TUNING);

  REQUIRE(cdc_ram_mu_of_h(1, &v) == CDC_OK);
  CHECK(v == doctest::Approx(1 + 255.0 / 256 * 2).epsilon(1e-3));
  REQUIRE(cdc_ram_h_for_target(2048, &h) == CDC_OK);
  double back = 0;
  REQUIRE(cdc_ram_mu_of_h(h, &back) == CDC_OK);
  CHECK(std::abs(back - 2048) < 10);

  uint32_t w = 0;
  REQUIRE(cdc_mii_mu_of_w(5, &v) == CDC_OK);
  CHECK(v == doctest::Approx(130).epsilon(0.01));
  REQUIRE(cdc_mii_w_for_target(770, &w) == CDC_OK);
  CHECK(w == 6);

  uint32_t theta = 0;
  double mean = 0;
  cdc_pci_options opt{};
  opt.sim_len = 2 << 20;
  opt.seed = 9;
  REQUIRE(cdc_pci_tune(1024, &opt, &w, &theta, &mean) == CDC_OK);
  CHECK(std::abs(mean - 1024) < 0.1 * 1024);
  CHECK(w >= 1);
  CHECK(theta <= 8 * w);
  CHECK(cdc_pci_tune(1024, nullptr, nullptr, &theta, &mean) == CDC_ERR_INVALID_ARGUMENT);
}

TEST_CASE("index and summary") {
  const auto x = stream_bytes(4, 1 << 16);
  std::vector<uint8_t> xx(x);
  xx.insert(xx.end(), x.begin(), x.end());
  cdc_spec* spec = resolve("fsc", 4096);
  auto chunks = run(spec, xx, 1 << 16, 1);
  cdc_spec_destroy(spec);

  cdc_index* a = nullptr;
  cdc_index* b = nullptr;
  REQUIRE(cdc_index_create(&a) == CDC_OK);
  REQUIRE(cdc_index_create(&b) == CDC_OK);
  for (size_t i = 0; i + 1 < chunks.size(); ++i)
    REQUIRE(cdc_index_ingest(i % 2 ? a : b, &chunks[i]) == CDC_OK);
  CHECK(cdc_index_ingest(a, &chunks.back()) == CDC_ERR_DOMAIN);
  REQUIRE(cdc_index_merge(a, b) == CDC_OK);
  uint64_t seen = 0;
  uint64_t unique = 0;
  double ratio = 0;
  REQUIRE(cdc_index_totals(a, &seen, &unique, &ratio) == CDC_OK);
  CHECK(seen == xx.size());
  CHECK(unique == x.size());
  CHECK(ratio == 0.5);
  cdc_index_destroy(a);
  cdc_index_destroy(b);

  char* json = nullptr;
  REQUIRE(cdc_summarize_json(chunks.data(), chunks.size(), 0, 4096, &json) == CDC_OK);
  const auto j = nlohmann::json::parse(json);
  cdc_free(json);
  CHECK(j["chunk_count"] == 32);
  CHECK(j["mean"] == 4096.0);
  CHECK(j["sd"] == 0.0);
  CHECK(j["dedup_ratio"] == 0.5);
  CHECK(cdc_summarize_json(chunks.data(), 0, 0, 0, &json) == CDC_ERR_EMPTY);
}

TEST_CASE("throughput") {
  const auto data = stream_bytes(5, 1 << 20);
  cdc_spec* spec = resolve("ae", 2048);
  cdc_throughput t{};
  REQUIRE(cdc_throughput_run(spec, data.data(), data.size(), 3, 0, &t) == CDC_OK);
  CHECK(t.repetitions == 3);
  CHECK(t.sum_of_sizes == data.size());
  CHECK(t.median_mibps > 0);
  cdc_spec_destroy(spec);
}

TEST_CASE("files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "cdc_capi_test";
  fs::create_directories(dir);
  const std::string p1 = (dir / "one").string();
  const std::string p2 = (dir / "two").string();
  std::ofstream(p1, std::ios::binary) << "abc";
  std::ofstream(p2, std::ios::binary) << "defgh";
  const char* paths[] = {p1.c_str(), p2.c_str()};
  uint8_t* data = nullptr;
  size_t len = 0;
  char* manifest = nullptr;
  REQUIRE(cdc_concat_corpus(paths, 2, &data, &len, &manifest) == CDC_OK);
  CHECK(len == 8);
  CHECK(std::memcmp(data, "abcdefgh", 8) == 0);
  const auto m = nlohmann::json::parse(manifest);
  CHECK(m["files"].size() == 2);
  CHECK(m["files"][1]["offset"] == 3);
  CHECK(m["total_bytes"] == 8);
  cdc_free(data);
  cdc_free(manifest);

  const std::string csv = (dir / "chunks.csv").string();
  std::ofstream(csv) << "# meta\nordinal,size,fingerprint,trailing\n0,4,,0\n1,2,,1\n";
  cdc_chunk* recs = nullptr;
  size_t count = 0;
  REQUIRE(cdc_read_chunk_csv(csv.c_str(), &recs, &count) == CDC_OK);
  REQUIRE(count == 2);
  CHECK(recs[0].length == 4);
  CHECK(recs[1].end == 6);
  CHECK(recs[1].trailing == 1);
  cdc_free(recs);

  const char* missing[] = {"/nonexistent/file"};
  CHECK(cdc_concat_corpus(missing, 1, &data, &len, &manifest) == CDC_ERR_IO);
  CHECK(cdc_read_chunk_csv("/nonexistent/file", &recs, &count) == CDC_ERR_IO);
  fs::remove_all(dir);
}
