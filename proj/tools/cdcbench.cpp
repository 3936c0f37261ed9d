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


// cdcbench: chunk, tune, benchmark and analyze from the command line. Talks to
// the library only through the C interface.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "cdc/cdc.h"

namespace {

using nlohmann::json;

constexpr std::uint64_t kDefaultLength = std::uint64_t{64} << 20;
constexpr std::size_t kBlockSize = std::size_t{1} << 20;
constexpr const char* kMetaPrefix = "# cdcbench ";

enum ExitCode { kOk = 0, kFailure = 1, kConfig = 2, kIo = 3, kTuning = 4 };

struct CliError {
  int exit_code;
  std::string message;
};

int exit_code_for(cdc_status s) {
  switch (s) {
    case CDC_ERR_CONFIG:
    case CDC_ERR_DOMAIN:
    case CDC_ERR_INVALID_ARGUMENT: return kConfig;
    case CDC_ERR_IO: return kIo;
    case CDC_ERR_TUNING: return kTuning;
    default: return kFailure;
  }
}

void check(cdc_status s) {
  if (s != CDC_OK) throw CliError{exit_code_for(s), cdc_last_error()};
}

struct SpecDeleter {
  void operator()(cdc_spec* p) const { cdc_spec_destroy(p); }
};
struct StreamDeleter {
  void operator()(cdc_stream* p) const { cdc_stream_destroy(p); }
};
using SpecPtr = std::unique_ptr<cdc_spec, SpecDeleter>;
using StreamPtr = std::unique_ptr<cdc_stream, StreamDeleter>;

// Owns a string or buffer allocated by the library.
template <typename T>
struct LibBuffer {
  T* ptr = nullptr;
  ~LibBuffer() { cdc_free(ptr); }
};

std::string hex(const std::uint8_t* p, std::size_t n) {
  static const char* kDigits = "0123456789abcdef";
  std::string s(2 * n, '0');
  for (std::size_t i = 0; i < n; ++i) {
    s[2 * i] = kDigits[p[i] >> 4];
    s[2 * i + 1] = kDigits[p[i] & 15];
  }
  return s;
}

struct Options {
  std::string algorithm;
  std::uint64_t target = 0;
  std::vector<std::string> inputs;
  std::uint64_t seed = 0;
  std::uint64_t length = kDefaultLength;
  std::string format = "csv";
  std::uint32_t reps = 10;
  std::vector<std::string> overrides;
  std::uint64_t bucket = 0;
  std::string from_file;
  std::string output;
  std::string manifest;
  bool full_grid = false;
  bool simulate = false;
  std::uint64_t pci_sim_len = 0;
};

struct Input {
  std::vector<std::uint8_t> bytes;
  json info;
};

Input load_input(const Options& o) {
  Input in;
  if (!o.inputs.empty()) {
    std::vector<const char*> paths;
    for (const auto& p : o.inputs) paths.push_back(p.c_str());
    LibBuffer<std::uint8_t> data;
    LibBuffer<char> manifest;
    std::size_t len = 0;
    check(cdc_concat_corpus(paths.data(), paths.size(), &data.ptr, &len, &manifest.ptr));
    in.bytes.assign(data.ptr, data.ptr + len);
    in.info = {{"source", "files"}, {"manifest", json::parse(manifest.ptr)}};
  } else {
    in.bytes.resize(o.length);
    check(cdc_generate_random(o.seed, 0, in.bytes.data(), in.bytes.size()));
    in.info = {{"source", "random"}, {"generator", cdc_random_generator()}};
  }
  std::uint8_t digest[32];
  check(cdc_sha256(in.bytes.data(), in.bytes.size(), digest));
  in.info["length"] = in.bytes.size();
  in.info["sha256"] = hex(digest, 32);
  return in;
}

SpecPtr resolve(const Options& o, const Input* input) {
  std::string joined;
  for (const auto& kv : o.overrides) {
    if (!joined.empty()) joined += ',';
    joined += kv;
  }
  cdc_pci_options pci{};
  pci.sim_len = o.pci_sim_len;
  pci.seed = o.seed;
  pci.full_grid = o.full_grid ? 1 : 0;
  pci.simulate = o.simulate ? 1 : 0;
  cdc_spec* spec = nullptr;
  const std::uint8_t* sample = input ? input->bytes.data() : nullptr;
  const std::size_t sample_len = input ? input->bytes.size() : 0;
  check(cdc_spec_resolve(o.algorithm.c_str(), o.target, joined.c_str(), sample, sample_len,
                         &pci, &spec));
  return SpecPtr(spec);
}

json spec_json(const cdc_spec* spec) {
  LibBuffer<char> s;
  check(cdc_spec_json(spec, &s.ptr));
  return json::parse(s.ptr);
}

json metadata(const char* command, const Options& o, const json& spec, const json& input) {
  return {{"tool", "cdcbench"}, {"version", cdc_version()}, {"command", command},
          {"seed", o.seed},     {"spec", spec},           {"input", input}};
}

bool needs_sample(const std::string& alg) {
  return alg.rfind("bfbc", 0) == 0;
}

// Writes to --output when given, otherwise to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::binary | std::ios::trunc);
      if (!file_) throw CliError{kIo, "cannot open output file " + path};
    }
  }
  std::ostream& out() { return file_.is_open() ? file_ : std::cout; }
  void close() {
    out().flush();
    if (!out()) throw CliError{kIo, "write failed"};
  }

 private:
  std::ofstream file_;
};

struct ChunkRun {
  std::vector<cdc_chunk> records;
};

void collect(void* ctx, const cdc_chunk* c) {
  static_cast<ChunkRun*>(ctx)->records.push_back(*c);
}

std::vector<cdc_chunk> chunk_all(const cdc_spec* spec, const std::vector<std::uint8_t>& data) {
  cdc_stream* raw = nullptr;
  check(cdc_stream_create(spec, 1, &raw));
  StreamPtr stream(raw);
  ChunkRun run;
  for (std::size_t off = 0; off < data.size(); off += kBlockSize) {
    const std::size_t n = std::min(kBlockSize, data.size() - off);
    check(cdc_stream_push(stream.get(), data.data() + off, n, collect, &run));
  }
  cdc_chunk trailing{};
  check(cdc_stream_finalize(stream.get(), &trailing));
  run.records.push_back(trailing);
  return std::move(run.records);
}

std::string csv_row(const cdc_chunk& c) {
  std::string row = std::to_string(c.ordinal);
  row += ',';
  row += std::to_string(c.length);
  row += ',';
  if (c.has_fingerprint) row += hex(c.fingerprint, 32);
  row += ',';
  row += c.trailing ? '1' : '0';
  row += '\n';
  return row;
}

json summarize(const std::vector<cdc_chunk>& records, std::uint64_t bucket,
               std::uint64_t target) {
  LibBuffer<char> s;
  check(cdc_summarize_json(records.data(), records.size(), bucket, target, &s.ptr));
  return json::parse(s.ptr);
}

int cmd_chunk(const Options& o) {
  const Input input = load_input(o);
  SpecPtr spec = resolve(o, &input);
  const json meta = metadata("chunk", o, spec_json(spec.get()), input.info);
  const std::vector<cdc_chunk> records = chunk_all(spec.get(), input.bytes);
  Sink sink(o.output);
  if (o.format == "json") {
    json chunks = json::array();
    for (const auto& c : records) {
      chunks.push_back({{"ordinal", c.ordinal},
                        {"size", c.length},
                        {"fingerprint", hex(c.fingerprint, 32)},
                        {"trailing", c.trailing != 0}});
    }
    sink.out() << json{{"metadata", meta}, {"chunks", chunks}}.dump() << '\n';
  } else {
    std::string buf = kMetaPrefix + meta.dump() + "\nordinal,size,fingerprint,trailing\n";
    for (const auto& c : records) {
      buf += csv_row(c);
      if (buf.size() >= kBlockSize) {
        sink.out() << buf;
        buf.clear();
      }
    }
    sink.out() << buf;
  }
  sink.close();
  return kOk;
}

int cmd_tune(const Options& o) {
  Input input;
  const bool use_input = !o.inputs.empty() || needs_sample(o.algorithm);
  if (use_input) input = load_input(o);
  SpecPtr spec = resolve(o, use_input ? &input : nullptr);
  json doc = spec_json(spec.get());
  doc["metadata"] = metadata("tune", o, doc, use_input ? input.info : json(nullptr));
  Sink sink(o.output);
  sink.out() << doc.dump(2) << '\n';
  sink.close();
  return kOk;
}

int cmd_bench(const Options& o) {
  const Input input = load_input(o);
  SpecPtr spec = resolve(o, &input);
  const json sj = spec_json(spec.get());
  cdc_throughput t{};
  check(cdc_throughput_run(spec.get(), input.bytes.data(), input.bytes.size(), o.reps,
                           kBlockSize, &t));
  json doc = {{"metadata", metadata("bench", o, sj, input.info)},
              {"algorithm", sj["algorithm"]},
              {"target_size", sj["target_size"]},
              {"median_MiBps", t.median_mibps},
              {"iqr_MiBps", t.iqr_mibps},
              {"n", t.repetitions},
              {"sum_of_sizes", t.sum_of_sizes},
              {"input_bytes", t.input_bytes}};
  Sink sink(o.output);
  sink.out() << doc.dump(2) << '\n';
  sink.close();
  if (t.sum_of_sizes != input.bytes.size()) {
    throw CliError{kFailure, "self-check failed: sum of chunk sizes " +
                                 std::to_string(t.sum_of_sizes) + " != input length " +
                                 std::to_string(input.bytes.size())};
  }
  return kOk;
}

// Metadata line of a chunk CSV, or null if the file has none.
json read_csv_metadata(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError{kIo, "cannot open " + path};
  std::string line;
  const std::string prefix = kMetaPrefix;
  while (std::getline(in, line) && !line.empty() && line[0] == '#') {
    if (line.rfind(prefix, 0) == 0) {
      json j = json::parse(line.substr(prefix.size()), nullptr, false);
      if (j.is_discarded()) throw CliError{kIo, path + ": malformed metadata line"};
      return j;
    }
  }
  return nullptr;
}

int cmd_analyze(const Options& o) {
  json doc;
  std::vector<cdc_chunk> records;
  std::uint64_t target = o.target;
  if (!o.from_file.empty()) {
    const json source = read_csv_metadata(o.from_file);
    LibBuffer<cdc_chunk> rs;
    std::size_t n = 0;
    check(cdc_read_chunk_csv(o.from_file.c_str(), &rs.ptr, &n));
    records.assign(rs.ptr, rs.ptr + n);
    if (target == 0 && source.is_object()) {
      target = source.at("spec").value("target_size", std::uint64_t{0});
    }
    json meta = {{"tool", "cdcbench"}, {"version", cdc_version()}, {"command", "analyze"},
                 {"from_file", o.from_file}};
    if (source.is_object()) {
      meta["seed"] = source.value("seed", json(nullptr));
      meta["spec"] = source.value("spec", json(nullptr));
      meta["input"] = source.value("input", json(nullptr));
    } else {
      meta["seed"] = nullptr;
      meta["spec"] = nullptr;
      meta["input"] = nullptr;
    }
    doc["metadata"] = meta;
  } else {
    const Input input = load_input(o);
    SpecPtr spec = resolve(o, &input);
    records = chunk_all(spec.get(), input.bytes);
    doc["metadata"] = metadata("analyze", o, spec_json(spec.get()), input.info);
  }
  doc["summary"] = summarize(records, o.bucket, target);
  Sink sink(o.output);
  sink.out() << doc.dump(2) << '\n';
  sink.close();
  return kOk;
}

int cmd_gen(const Options& o) {
  if (o.output.empty()) throw CliError{kConfig, "gen needs --output"};
  json info;
  Sink sink(o.output);
  if (!o.inputs.empty()) {
    const Input input = load_input(o);
    sink.out().write(reinterpret_cast<const char*>(input.bytes.data()),
                     static_cast<std::streamsize>(input.bytes.size()));
    info = input.info;
  } else {
    std::vector<std::uint8_t> buf(kBlockSize);
    std::uint8_t digest[32];
    // Streamed so large outputs need no full-size buffer; the digest is
    // taken over the written file afterwards.
    for (std::uint64_t off = 0; off < o.length; off += kBlockSize) {
      const std::size_t n = static_cast<std::size_t>(std::min<std::uint64_t>(kBlockSize, o.length - off));
      check(cdc_generate_random(o.seed, off, buf.data(), n));
      sink.out().write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(n));
    }
    sink.close();
    const char* path = o.output.c_str();
    LibBuffer<std::uint8_t> data;
    std::size_t len = 0;
    check(cdc_concat_corpus(&path, 1, &data.ptr, &len, nullptr));
    check(cdc_sha256(data.ptr, len, digest));
    info = {{"source", "random"}, {"generator", cdc_random_generator()},
            {"length", o.length}, {"sha256", hex(digest, 32)}};
  }
  sink.close();
  if (!o.manifest.empty()) {
    Sink m(o.manifest);
    m.out() << json{{"tool", "cdcbench"}, {"version", cdc_version()}, {"command", "gen"},
                    {"seed", o.seed}, {"spec", nullptr}, {"input", info}}
                   .dump(2)
            << '\n';
    m.close();
  }
  return kOk;
}

void add_common(CLI::App* cmd, Options& o, bool with_alg) {
  if (with_alg) {
    cmd->add_option("--alg", o.algorithm, "Algorithm name (fsc, rabin, buzhash, gear, gear-nc, "
                                          "ae, ram, mii, pci, bfbc, bfbc-star)")
        ->required();
    cmd->add_option("--target,--size", o.target, "Target chunk size in bytes")->required();
    cmd->add_option("--override", o.overrides, "Parameter override key=value (repeatable)");
    cmd->add_flag("--full-grid", o.full_grid, "PCI tuner: evaluate every threshold");
    cmd->add_flag("--simulate", o.simulate, "PCI: tune by simulation even for table targets");
    cmd->add_option("--pci-sim-len", o.pci_sim_len, "PCI tuner simulation length in bytes");
  }
  cmd->add_option("--input", o.inputs, "Input file(s), concatenated in order; "
                                       "random data when absent");
  cmd->add_option("--seed", o.seed, "Random data seed")->envname("CHUNKBENCH_SEED");
  cmd->add_option("--len", o.length, "Random data length in bytes");
  cmd->add_option("--output,-o", o.output, "Output file (default: stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Content-defined chunking benchmark tool"};
  app.set_version_flag("--version", std::string(cdc_version()));
  app.require_subcommand(1);
  Options o;

  auto* chunk = app.add_subcommand("chunk", "Emit chunk records as CSV or JSON");
  add_common(chunk, o, true);
  chunk->add_option("--format", o.format, "Output format")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* tune = app.add_subcommand("tune", "Resolve parameters for an algorithm and target");
  add_common(tune, o, true);

  auto* bench = app.add_subcommand("bench", "Measure chunking throughput");
  add_common(bench, o, true);
  bench->add_option("--reps", o.reps, "Timed repetitions")->check(CLI::Range(1u, 100000u));

  auto* analyze = app.add_subcommand("analyze", "Chunk-size statistics and deduplication ratio");
  analyze->add_option("--alg", o.algorithm, "Algorithm name");
  analyze->add_option("--target,--size", o.target, "Target chunk size in bytes");
  analyze->add_option("--override", o.overrides, "Parameter override key=value (repeatable)");
  analyze->add_flag("--full-grid", o.full_grid, "PCI tuner: evaluate every threshold");
  analyze->add_flag("--simulate", o.simulate, "PCI: tune by simulation even for table targets");
  analyze->add_option("--pci-sim-len", o.pci_sim_len, "PCI tuner simulation length in bytes");
  analyze->add_option("--input", o.inputs, "Input file(s); random data when absent");
  analyze->add_option("--seed", o.seed, "Random data seed")->envname("CHUNKBENCH_SEED");
  analyze->add_option("--len", o.length, "Random data length in bytes");
  analyze->add_option("--output,-o", o.output, "Output file (default: stdout)");
  analyze->add_option("--from-file", o.from_file, "Chunk CSV written by 'chunk'");
  analyze->add_option("--bucket", o.bucket, "Histogram bucket width (default: target / 64)");

  auto* gen = app.add_subcommand("gen", "Write a random stream or a concatenated corpus");
  add_common(gen, o, false);
  gen->add_option("--manifest", o.manifest, "Write a JSON manifest to this path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfig;
  }

  try {
    if (*analyze && o.from_file.empty() && (o.algorithm.empty() || o.target == 0)) {
      throw CliError{kConfig, "analyze needs --from-file or --alg and --target"};
    }
    if (*chunk) return cmd_chunk(o);
    if (*tune) return cmd_tune(o);
    if (*bench) return cmd_bench(o);
    if (*analyze) return cmd_analyze(o);
    if (*gen) return cmd_gen(o);
  } catch (const CliError& e) {
    std::cerr << "cdcbench: " << e.message << '\n';
    return e.exit_code;
  } catch (const std::exception& e) {
    std::cerr << "cdcbench: " << e.what() << '\n';
    return kFailure;
  }
  return kOk;
}
