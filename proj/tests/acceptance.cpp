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


// Acceptance run: one PASS/FAIL line per criterion on a seeded 64 MiB random
// stream. Exits non-zero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cdc/analysis.hpp"
#include "cdc/datasets.hpp"
#include "cdc/tuning.hpp"
#include "test_support.hpp"

using namespace cdc;
namespace oracle = testing::oracle;

namespace {

constexpr std::uint64_t kSeed = 42;
constexpr std::uint64_t kStreamLength = std::uint64_t{64} << 20;

using Data = std::span<const std::uint8_t>;

// Collects the detail text of one criterion and whether every check held.
class Verdict {
 public:
  void check(bool ok, const std::string& detail) {
    ok_ = ok_ && ok;
    if (!detail_.empty()) detail_ += "; ";
    detail_ += ok ? "" : "!";
    detail_ += detail;
  }
  bool ok() const { return ok_; }
  const std::string& detail() const { return detail_; }

 private:
  bool ok_ = true;
  std::string detail_;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), f, a, b);
  return buf;
}

std::string fmt(const char* f, double a, double b, double c) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), f, a, b, c);
  return buf;
}

StatsSummary stats(const ChunkerSpec& spec, Data data) {
  return summarize(chunk_buffer(spec, data, FingerprintMode::kNone), 0, spec.target_size);
}

double rel(double value, double target) { return value / target - 1.0; }

// 1. AE target fidelity.
void ae_fidelity(Data data, Verdict& v) {
  for (std::uint64_t mu : {512, 1024, 2048, 8192}) {
    const auto spec = resolve_spec(Algorithm::kAe, mu, {}).spec;
    const double mean = stats(spec, data).mean;
    v.check(std::abs(rel(mean, mu)) <= 0.03,
            fmt("mu=%.0f mean=%.1f (%+.2f%%)", mu, mean, 100 * rel(mean, mu)));
  }
}

// 2. RAM target fidelity.
void ram_fidelity(Data data, Verdict& v) {
  for (std::uint64_t mu : {512, 2048, 8192}) {
    const auto spec = resolve_spec(Algorithm::kRam, mu, {}).spec;
    const double mean = stats(spec, data).mean;
    v.check(std::abs(rel(mean, mu)) <= 0.02,
            fmt("mu=%.0f mean=%.1f (%+.2f%%)", mu, mean, 100 * rel(mean, mu)));
  }
}

// 3. MII exceeds its predicted mean.
void mii_offset(Data data, Verdict& v) {
  for (std::uint32_t w : {5u, 6u}) {
    const double predicted = mii_mu_of_w(w);
    const auto spec =
        resolve_spec(Algorithm::kMii, static_cast<std::uint64_t>(std::llround(predicted)),
                     {{"w", std::to_string(w)}})
            .spec;
    const double mean = stats(spec, data).mean;
    const double excess = rel(mean, predicted);
    v.check(excess >= 0.10 && excess <= 0.20,
            fmt("w=%.0f predicted=%.1f mean=%.1f", w, predicted, mean) +
                fmt(" (%+.2f%%)", 100 * excess));
  }
}

// 4. PCI table parameters and re-tuning.
void pci_targets(Data data, Verdict& v) {
  {
    const ResolvedSpec r = resolve_spec(Algorithm::kPci, 1024, {});
    const bool table = r.provenance.at("window") == "table" && *r.spec.params.window == 34 &&
                       *r.spec.params.threshold == 157;
    const double mean = stats(r.spec, data).mean;
    v.check(table && std::abs(rel(mean, 1024)) <= 0.10,
            fmt("(34,157) mean=%.1f (%+.2f%%)", mean, 100 * rel(mean, 1024)));
  }
  for (std::uint64_t mu : {512, 2048}) {
    PciTuneOptions opt;
    opt.seed = kSeed + 1;
    opt.simulate = true;
    const ResolvedSpec r = resolve_spec(Algorithm::kPci, mu, {}, {}, opt);
    const double mean = stats(r.spec, data).mean;
    v.check(r.provenance.at("window") == "simulation" && std::abs(rel(mean, mu)) <= 0.10,
            fmt("mu=%.0f tuned (%.0f,", mu, *r.spec.params.window) +
                fmt("%.0f) mean=%.1f", *r.spec.params.threshold, mean) +
                fmt(" (%+.2f%%)", 100 * rel(mean, mu)));
  }
}

// 5. Sliding-window hashes: target means and masked-bit zero rates.
void bsw(Data data, Verdict& v) {
  for (Algorithm alg : {Algorithm::kBswRabin, Algorithm::kBswBuzhash, Algorithm::kBswGear}) {
    for (std::uint64_t mu : {1024, 4096}) {
      const auto spec = resolve_spec(alg, mu, {}).spec;
      const double mean = stats(spec, data).mean;
      v.check(std::abs(rel(mean, mu)) <= 0.05,
              std::string(algorithm_name(alg)) +
                  fmt(" mu=%.0f mean=%.1f (%+.2f%%)", mu, mean, 100 * rel(mean, mu)));
    }
  }

  constexpr std::uint64_t kWindows = 1'000'000;
  constexpr std::uint32_t kWidth = kBswWindow;
  const ByteTable table = make_byte_table();
  RollingState states[] = {RollingState(RollingKind::kRabin, kWidth, table),
                           RollingState(RollingKind::kBuzhash, kWidth, table),
                           RollingState(RollingKind::kGear, kWidth, table)};
  const char* names[] = {"rabin", "buzhash", "gear"};
  const int word_bits[] = {64, 32, 32};
  const std::uint32_t bits[] = {8, 11, 13};
  // hits[hash][b][low/high]
  std::uint64_t hits[3][3][2] = {};
  for (std::uint64_t i = 0; i < kWindows + kWidth - 1; ++i) {
    for (auto& s : states) s.push(data[i]);
    if (i + 1 < kWidth) continue;
    for (int k = 0; k < 3; ++k) {
      const std::uint64_t h = states[k].value();
      for (int j = 0; j < 3; ++j) {
        hits[k][j][0] += (h & ((std::uint64_t{1} << bits[j]) - 1)) == 0;
        hits[k][j][1] += (h >> (word_bits[k] - bits[j])) == 0;
      }
    }
  }
  std::string worst;
  double worst_z = 0;
  bool all = true;
  for (int k = 0; k < 3; ++k) {
    for (int j = 0; j < 3; ++j) {
      const double p = std::ldexp(1.0, -static_cast<int>(bits[j]));
      const double se = std::sqrt(p * (1 - p) / kWindows);
      for (int side = 0; side < 2; ++side) {
        const double z = (static_cast<double>(hits[k][j][side]) / kWindows - p) / se;
        all = all && std::abs(z) <= 3;
        if (std::abs(z) >= std::abs(worst_z)) {
          worst_z = z;
          worst = std::string(names[k]) + (side ? " high" : " low") + fmt(" b=%.0f", bits[j]);
        }
      }
    }
  }
  v.check(all, "zero rates over 1e6 windows, worst " + worst + fmt(" z=%+.2f", worst_z));
}

// 6. Distribution of the maximum of h bytes.
void mh_model(Data data, Verdict& v) {
  double worst_sum = 0;
  for (std::uint64_t h = 1; h <= 4096; ++h) {
    double s = 0;
    for (int m = 0; m < 256; ++m) s += mh_pmf(h, m);
    worst_sum = std::max(worst_sum, std::abs(s - 1));
  }
  v.check(worst_sum <= 1e-12, fmt("max |sum pmf - 1| = %.1e", worst_sum));
  const double p2000 = mh_pmf(2000, 255);
  v.check(p2000 > 0.999, fmt("P(M_2000=255)=%.5f", p2000));

  for (std::uint64_t h : {8, 64, 348}) {
    const std::uint64_t n = data.size() / h;
    std::vector<std::uint64_t> hist(256);
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto block = data.subspan(i * h, h);
      ++hist[*std::max_element(block.begin(), block.end())];
    }
    // Mean and the probability of the top value, each against its SE.
    double mean = 0;
    double var = 0;
    for (int m = 0; m < 256; ++m) mean += m * mh_pmf(h, m);
    for (int m = 0; m < 256; ++m) var += (m - mean) * (m - mean) * mh_pmf(h, m);
    double observed = 0;
    for (int m = 0; m < 256; ++m) observed += m * static_cast<double>(hist[m]);
    observed /= static_cast<double>(n);
    const double z_mean = (observed - mean) / std::sqrt(var / static_cast<double>(n));
    const double p = mh_pmf(h, 255);
    const double z_top = (static_cast<double>(hist[255]) / static_cast<double>(n) - p) /
                         std::sqrt(p * (1 - p) / static_cast<double>(n));
    v.check(std::abs(z_mean) <= 3 && std::abs(z_top) <= 3,
            fmt("h=%.0f z(mean)=%+.2f z(P255)=%+.2f", h, z_mean, z_top));
  }
}

// 7. Rolling hashes against direct recomputation.
void rolling_oracles(Data data, Verdict& v) {
  Xorshift64Star rng(kSeed + 7);
  const ByteTable table = make_byte_table();
  const ByteTable64 table64 = make_byte_table64();
  constexpr int kCases = 10'000;
  int rabin_bad = 0;
  int buz_bad = 0;
  int gear_bad = 0;
  for (int c = 0; c < kCases; ++c) {
    const auto w = static_cast<std::uint32_t>(1 + rng.next() % 64);
    const std::uint64_t steps = rng.next() % 64;
    const std::uint64_t start = rng.next() % (data.size() - w - steps);
    const Data first = data.subspan(start, w);
    const RabinHash rabin(w);
    const Buzhash buz(w, table);
    std::uint64_t hr = rabin.init(first);
    std::uint32_t hb = buz.init(first);
    for (std::uint64_t s = 0; s < steps; ++s) {
      hr = rabin.roll(hr, data[start + s], data[start + s + w]);
      hb = buz.roll(hb, data[start + s], data[start + s + w]);
    }
    const Data last = data.subspan(start + steps, w);
    rabin_bad += hr != oracle::rabin_hash(last);
    buz_bad += hb != oracle::buzhash_hash(last, table);

    const std::uint64_t len = 1 + rng.next() % 100;
    const Data prefix = data.subspan(start, len);
    std::uint32_t g32 = 0;
    std::uint64_t g64 = 0;
    for (auto b : prefix) {
      g32 = gear_update(g32, b, table);
      g64 = gear_update(g64, b, table64);
    }
    gear_bad += g32 != oracle::gear_sum<std::uint32_t>(prefix, table);
    gear_bad += g64 != oracle::gear_sum<std::uint64_t>(prefix, table64);
  }
  v.check(rabin_bad == 0, fmt("rabin %.0f/%.0f mismatches", rabin_bad, kCases));
  v.check(buz_bad == 0, fmt("buzhash %.0f/%.0f mismatches", buz_bad, kCases));
  v.check(gear_bad == 0, fmt("gear %.0f/%.0f mismatches", gear_bad, 2 * kCases));
}

// 8. Chunk-size spread at a 2048-byte target.
void variance_ordering(Data data, Verdict& v) {
  auto sd_of = [&](Algorithm alg, const Overrides& o) {
    return stats(resolve_spec(alg, 2048, o).spec, data).sd;
  };
  const double ae = sd_of(Algorithm::kAe, {});
  const double gear = sd_of(Algorithm::kBswGear, {});
  const double nc1 = sd_of(Algorithm::kGearNc, {{"x", "1"}});
  const double nc3 = sd_of(Algorithm::kGearNc, {{"x", "3"}});
  v.check(ae < gear, fmt("SD ae=%.0f < gear=%.0f", ae, gear));
  v.check(nc3 < nc1 && nc1 < gear, fmt("SD nc3=%.0f < nc1=%.0f < gear=%.0f", nc3, nc1, gear));
}

// 9. Deduplication ratio.
void dedup(Data data, Verdict& v) {
  const Data half = data.first(data.size() / 2);
  std::vector<std::uint8_t> doubled(half.begin(), half.end());
  doubled.insert(doubled.end(), half.begin(), half.end());

  auto ratio = [](const std::vector<ChunkRecord>& recs) {
    return *summarize(recs, 0).dedup_ratio;
  };
  const auto fsc = resolve_spec(Algorithm::kFsc, 4096, {}).spec;
  const double r_fsc = ratio(chunk_buffer(fsc, doubled, FingerprintMode::kSha256));
  v.check(r_fsc == 0.5, fmt("fsc doubled=%.6f", r_fsc));

  const auto ae = resolve_spec(Algorithm::kAe, 2048, {}).spec;
  auto ae_recs = chunk_buffer(ae, doubled, FingerprintMode::kSha256);
  const double r_ae = ratio(ae_recs);
  v.check(r_ae >= 0.45, fmt("ae doubled=%.6f", r_ae));

  const double r_rand = ratio(chunk_buffer(ae, data, FingerprintMode::kSha256));
  v.check(r_rand < 0.001, fmt("ae random=%.2e", r_rand));

  ae_recs.pop_back();
  FingerprintIndex whole;
  for (const auto& r : ae_recs) whole.ingest(r);
  Xorshift64Star rng(kSeed + 9);
  auto shuffled = ae_recs;
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  FingerprintIndex parts[4];
  for (std::size_t i = 0; i < shuffled.size(); ++i) parts[rng.next() % 4].ingest(shuffled[i]);
  FingerprintIndex merged = parts[3];
  for (int k = 2; k >= 0; --k) merged.merge(parts[k]);
  FingerprintIndex reordered;
  for (const auto& r : shuffled) reordered.ingest(r);
  const bool same = merged.dedup_ratio() == whole.dedup_ratio() &&
                    reordered.dedup_ratio() == whole.dedup_ratio() &&
                    merged.bytes_unique() == whole.bytes_unique();
  v.check(same, "permutation and merge invariant");
}

// 10. Minimum chunk lengths and block-size independence.
void invariants(Data data, Verdict& v) {
  std::vector<ChunkerSpec> specs;
  for (Algorithm alg : kAllAlgorithms) {
    const std::uint64_t mu = (alg == Algorithm::kAe || alg == Algorithm::kPci) ? 512 : 256;
    const bool needs_sample = alg == Algorithm::kBfbc || alg == Algorithm::kBfbcStar;
    specs.push_back(
        resolve_spec(alg, mu, {}, needs_sample ? data.first(1 << 20) : Data{}).spec);
  }
  Xorshift64Star rng(kSeed + 10);
  constexpr int kStreams = 1000;
  std::uint64_t violations = 0;
  std::uint64_t chunks = 0;
  for (int s = 0; s < kStreams; ++s) {
    const std::uint64_t len = rng.next() % 32768;
    const std::uint64_t start = rng.next() % (data.size() - len);
    const Data stream = data.subspan(start, len);
    std::vector<std::size_t> blocks(1 + rng.next() % 8);
    for (auto& b : blocks) b = 1 + rng.next() % 3000;
    for (const auto& spec : specs) {
      const auto whole = boundaries_of(spec, stream);
      const auto split = testing::boundaries_in_blocks(spec, stream, blocks);
      violations += whole != split;
      const std::uint64_t min_len = minimum_chunk_length(spec);
      std::uint64_t prev = 0;
      for (auto b : whole) {
        violations += b - prev < min_len;
        prev = b;
      }
      chunks += whole.size();
    }
  }
  v.check(violations == 0, fmt("%.0f streams x %.0f algorithms, %.0f chunks", kStreams,
                               static_cast<double>(specs.size()), static_cast<double>(chunks)) +
                               fmt(", %.0f violations", static_cast<double>(violations)));
}

// 11. Relative throughput.
void throughput(Data data, Verdict& v) {
  constexpr std::uint32_t kReps = 10;
  auto median = [&](Algorithm alg) {
    const bool needs_sample = alg == Algorithm::kBfbc || alg == Algorithm::kBfbcStar;
    const auto spec = resolve_spec(alg, 2048, {}, needs_sample ? data : Data{}).spec;
    return throughput_run(spec, data, kReps).median_mibps;
  };
  const double fsc = median(Algorithm::kFsc);
  double fastest_cdc = 0;
  std::string fastest_name;
  double rabin = 0;
  double buzhash = 0;
  double gear = 0;
  double ae = 0;
  double ram = 0;
  for (Algorithm alg : kAllAlgorithms) {
    if (alg == Algorithm::kFsc) continue;
    const double m = median(alg);
    if (m > fastest_cdc) {
      fastest_cdc = m;
      fastest_name = algorithm_name(alg);
    }
    if (alg == Algorithm::kBswRabin) rabin = m;
    if (alg == Algorithm::kBswBuzhash) buzhash = m;
    if (alg == Algorithm::kBswGear) gear = m;
    if (alg == Algorithm::kAe) ae = m;
    if (alg == Algorithm::kRam) ram = m;
  }
  v.check(fsc > fastest_cdc,
          fmt("fsc=%.0f > fastest cdc=%.0f MiB/s", fsc, fastest_cdc) + " (" + fastest_name + ")");
  v.check(ram > ae, fmt("ram=%.0f > ae=%.0f", ram, ae));
  v.check(gear > buzhash && buzhash > rabin,
          fmt("gear=%.0f > buzhash=%.0f > rabin=%.0f", gear, buzhash, rabin));
}

// 12. BFBC* divisor selection and end-to-end mean.
void bfbc_star(Data data, Verdict& v) {
  std::vector<PairCount> f = {{1, 100}, {2, 50}, {3, 10}};
  const auto set = bfbc_divisors(f, 8, 1000, 0);
  // Expected means l / (1 + sum of chosen counts): 1000/101, 1000/151, 1000/161.
  const std::size_t d1[] = {0};
  const std::size_t d12[] = {0, 1};
  const std::size_t d123[] = {0, 1, 2};
  const bool means = std::abs(bfbc_expected_mean(f, d1, 1000, 0) - 1000.0 / 101) < 1e-9 &&
                     std::abs(bfbc_expected_mean(f, d12, 1000, 0) - 1000.0 / 151) < 1e-9 &&
                     std::abs(bfbc_expected_mean(f, d123, 1000, 0) - 1000.0 / 161) < 1e-9;
  v.check(set->chosen() == std::vector<std::size_t>{0, 1} && means, "trace selects D={1,2}");

  const auto r = resolve_spec(Algorithm::kBfbcStar, 2048, {}, data);
  const double mean = stats(r.spec, data).mean;
  v.check(std::abs(rel(mean, 2048)) <= 0.15,
          fmt("%.0f divisors, mean=%.1f (%+.2f%%)", static_cast<double>(r.spec.params.divisors->size()),
              mean, 100 * rel(mean, 2048)));
}

struct Criterion {
  int id;
  const char* name;
  std::function<void(Data, Verdict&)> run;
};

}  // namespace

int main() {
  const std::vector<std::uint8_t> stream = generate_random(kSeed, kStreamLength);
  const Data data(stream);
  std::printf("random stream: seed %llu, %llu bytes\n", static_cast<unsigned long long>(kSeed),
              static_cast<unsigned long long>(kStreamLength));

  const Criterion criteria[] = {
      {1, "AE target fidelity", ae_fidelity},
      {2, "RAM target fidelity", ram_fidelity},
      {3, "MII mean above prediction", mii_offset},
      {4, "PCI parameters", pci_targets},
      {5, "sliding-window hashes", bsw},
      {6, "maximum-of-h model", mh_model},
      {7, "rolling-hash oracles", rolling_oracles},
      {8, "variance ordering", variance_ordering},
      {9, "deduplication ratio", dedup},
      {10, "minimum lengths and block independence", invariants},
      {11, "throughput ordering", throughput},
      {12, "BFBC* divisors", bfbc_star},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Verdict v;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      c.run(data, v);
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !v.ok();
    std::printf("%s %2d %s [%.1fs]: %s\n", v.ok() ? "PASS" : "FAIL", c.id, c.name, secs,
                v.detail().c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(std::size(criteria)) - failed,
              std::size(criteria));
  return failed == 0 ? 0 : 1;
}
