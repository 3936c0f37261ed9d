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

#include "cdc/tuning.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include "cdc/datasets.hpp"
#include "cdc/random.hpp"

namespace cdc {
namespace {

void check_mh_args(std::uint64_t h, int m) {
  if (h < 1) throw Error(ErrorCode::kDomain, "M_h: horizon must be >= 1");
  if (m < 0 || m > 255) throw Error(ErrorCode::kDomain, "M_h: value outside [0, 255]");
}

double power(double base, std::uint64_t h) {
  return std::pow(base, static_cast<double>(h));
}

}  // namespace

double mh_cdf(std::uint64_t h, int m) {
  check_mh_args(h, m);
  return power((m + 1) / 256.0, h);
}

double mh_pmf(std::uint64_t h, int m) {
  check_mh_args(h, m);
  return power((m + 1) / 256.0, h) - power(m / 256.0, h);
}

double mh_pmf_conditioned(std::uint64_t h, int m, int x) {
  check_mh_args(h, m);
  if (x < 0 || x > 255) throw Error(ErrorCode::kDomain, "M_h: lower bound outside [0, 255]");
  if (m < x) return 0.0;
  const double span = 256.0 - x;
  return power((m - x + 1) / span, h) - power((m - x) / span, h);
}

double mh_expectation(std::uint64_t h) { return mh_distribution(h).expectation(); }

double MhDistribution::cdf(int m) const {
  if (m < 0) return 0.0;
  if (m > 255) m = 255;
  double acc = 0.0;
  for (int i = 0; i <= m; ++i) acc += pmf[i];
  return acc;
}

double MhDistribution::expectation() const {
  double e = 0.0;
  for (int m = 0; m < 256; ++m) e += m * pmf[m];
  return e;
}

MhDistribution mh_distribution(std::uint64_t h, std::optional<int> lower_bound) {
  MhDistribution d;
  d.horizon = h;
  d.lower_bound = lower_bound;
  for (int m = 0; m < 256; ++m) {
    d.pmf[m] = lower_bound ? mh_pmf_conditioned(h, m, *lower_bound) : mh_pmf(h, m);
  }
  return d;
}

std::string_view provenance_name(Provenance p) {
  switch (p) {
    case Provenance::kTable: return "table";
    case Provenance::kFormula: return "formula";
    case Provenance::kInterpolated: return "interpolated";
    case Provenance::kSimulation: return "simulation";
    case Provenance::kFrequencyAnalysis: return "frequency-analysis";
    case Provenance::kFixed: return "fixed";
    case Provenance::kOverride: return "override";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// AE

namespace {

struct AePoint {
  std::uint64_t mu;
  std::uint64_t h;
};

constexpr AePoint kAeTable[] = {{512, 348}, {770, 563}, {1024, 793}};
constexpr std::uint64_t kAeLargeTarget = 2048;
constexpr std::uint64_t kAeLargeOffset = 256;

}  // namespace

AeHorizon ae_h_for_target(std::uint64_t mu) {
  if (mu < kAeTable[0].mu) {
    throw Error(ErrorCode::kTuning, "ae: targets below 512 bytes are unsupported");
  }
  if (mu >= kAeLargeTarget) return {mu - kAeLargeOffset, Provenance::kFormula, false};
  for (const auto& p : kAeTable) {
    if (p.mu == mu) return {p.h, Provenance::kTable, false};
  }
  // Interpolate between the bracketing points; (2048, 1792) closes the range.
  AePoint lo = kAeTable[0];
  AePoint hi{kAeLargeTarget, kAeLargeTarget - kAeLargeOffset};
  for (const auto& p : kAeTable) {
    if (p.mu < mu) lo = p;
    if (p.mu > mu) {
      hi = p;
      break;
    }
  }
  const double t = static_cast<double>(mu - lo.mu) / static_cast<double>(hi.mu - lo.mu);
  const double h = static_cast<double>(lo.h) + t * (static_cast<double>(hi.h) - static_cast<double>(lo.h));
  return {static_cast<std::uint64_t>(std::llround(h)), Provenance::kInterpolated, true};
}

// ---------------------------------------------------------------------------
// RAM

double ram_mu_of_h(std::uint64_t h) {
  const double e = mh_expectation(h);
  return static_cast<double>(h) + 1.0 / (1.0 - e / 256.0);
}

std::uint64_t ram_h_for_target(double mu) {
  if (!(mu > 2.0)) throw Error(ErrorCode::kDomain, "ram: target must exceed 2");
  if (ram_mu_of_h(1) >= mu) return 1;
  // mu(h) is strictly increasing; bracket then bisect for the first h with
  // mu(h) >= mu.
  std::uint64_t lo = 1;
  std::uint64_t hi = 2;
  while (ram_mu_of_h(hi) < mu) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (ram_mu_of_h(mid) < mu) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return std::abs(ram_mu_of_h(lo) - mu) <= std::abs(ram_mu_of_h(hi) - mu) ? lo : hi;
}

// ---------------------------------------------------------------------------
// MII

double mii_mu_of_w(std::uint32_t w) {
  if (w < 1 || w > 256) throw Error(ErrorCode::kDomain, "mii: window outside [1, 256]");
  const double log_choose = std::lgamma(257.0) - std::lgamma(w + 1.0) - std::lgamma(257.0 - w);
  return std::exp(w * std::log(256.0) - log_choose) + w;
}

std::uint32_t mii_w_for_target(double mu) {
  std::uint32_t best = 1;
  double best_err = std::numeric_limits<double>::infinity();
  for (std::uint32_t w = 1; w <= 256; ++w) {
    const double err = std::abs(mii_mu_of_w(w) - mu);
    if (err < best_err) {
      best_err = err;
      best = w;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// PCI

double pci_popcount_probability(std::uint32_t w, std::uint32_t theta) {
  const double n = 8.0 * w;
  if (theta > 8 * w) return 0.0;
  const double log_choose = std::lgamma(n + 1) - std::lgamma(theta + 1.0) - std::lgamma(n - theta + 1);
  return std::exp(log_choose - n * std::log(2.0));
}

std::optional<PciParams> pci_table_lookup(std::uint64_t mu) {
  struct Row {
    std::uint64_t mu;
    PciParams params;
  };
  static constexpr Row kRows[] = {
      {512, {58, 253}},  {770, {40, 181}},  {1024, {34, 157}}, {2048, {61, 273}},
      {4096, {39, 183}}, {5482, {56, 256}}, {8192, {57, 262}},
  };
  for (const auto& r : kRows) {
    if (r.mu == mu) return r.params;
  }
  return std::nullopt;
}

std::vector<std::uint32_t> pci_theta_candidates(std::uint64_t mu, std::uint32_t w) {
  const double lo = 1.0 / (4.0 * static_cast<double>(mu));
  const double hi = 4.0 / static_cast<double>(mu);
  std::vector<std::uint32_t> out;
  for (std::uint32_t theta = 0; theta <= 8 * w; ++theta) {
    const double p = pci_popcount_probability(w, theta);
    if (p >= lo && p <= hi) out.push_back(theta);
  }
  return out;
}

namespace {

double simulate_pci_mean(std::uint32_t w, std::uint32_t theta, std::uint64_t sim_len,
                         std::uint64_t seed, std::vector<std::uint8_t>& buffer) {
  const std::uint64_t stream_seed = mix64(seed ^ mix64((std::uint64_t{w} << 32) | theta));
  buffer.resize(sim_len);
  fill_random(stream_seed, 0, buffer);
  PciDetector det(w, theta);
  std::span<const std::uint8_t> rest(buffer);
  std::uint64_t consumed = 0;
  std::uint64_t last = 0;
  std::uint64_t cuts = 0;
  while (!rest.empty()) {
    const std::size_t k = det.scan(rest);
    if (k == 0) break;
    consumed += k;
    last = consumed;
    ++cuts;
    rest = rest.subspan(k);
  }
  if (cuts == 0) return std::numeric_limits<double>::infinity();
  return static_cast<double>(last) / static_cast<double>(cuts);
}

}  // namespace

PciTuneResult pci_tune(std::uint64_t mu, const PciTuneOptions& options) {
  if (mu < kMinTargetSize) throw Error(ErrorCode::kDomain, "pci: target must be >= 64");
  if (options.sim_len < (1u << 20)) {
    throw Error(ErrorCode::kDomain, "pci: simulation length must be >= 1 MiB");
  }
  if (options.min_window < 1 || options.min_window > options.max_window) {
    throw Error(ErrorCode::kDomain, "pci: bad window range");
  }

  PciTuneResult result;
  for (std::uint32_t w = options.min_window; w <= options.max_window; ++w) {
    if (options.full_grid) {
      for (std::uint32_t theta = 0; theta <= 8 * w; ++theta) {
        result.evaluated.push_back({w, theta, pci_popcount_probability(w, theta), 0.0});
      }
    } else {
      for (std::uint32_t theta : pci_theta_candidates(mu, w)) {
        result.evaluated.push_back({w, theta, pci_popcount_probability(w, theta), 0.0});
      }
    }
  }
  if (result.evaluated.empty()) {
    throw Error(ErrorCode::kTuning, "pci: no candidate parameters for this target");
  }

  unsigned threads = options.threads != 0 ? options.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(result.evaluated.size())));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    std::vector<std::uint8_t> buffer;
    for (std::size_t i = next++; i < result.evaluated.size(); i = next++) {
      auto& c = result.evaluated[i];
      c.empirical_mean = simulate_pci_mean(c.window, c.threshold, options.sim_len, options.seed, buffer);
    }
  };
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  const double target = static_cast<double>(mu);
  const PciCandidate* best = nullptr;
  for (const auto& c : result.evaluated) {
    if (!std::isfinite(c.empirical_mean)) continue;
    if (best == nullptr ||
        std::abs(c.empirical_mean - target) < std::abs(best->empirical_mean - target)) {
      best = &c;
    }
  }
  if (best == nullptr || std::abs(best->empirical_mean - target) > 0.5 * target) {
    throw Error(ErrorCode::kTuning, "pci: no candidate within 50% of the target");
  }
  result.params = {best->window, best->threshold};
  result.empirical_mean = best->empirical_mean;
  return result;
}

// ---------------------------------------------------------------------------
// BFBC

std::vector<PairCount> pair_frequencies(std::span<const std::uint8_t> data) {
  if (data.size() < 2) throw Error(ErrorCode::kDomain, "pair frequencies need >= 2 bytes");
  std::vector<std::uint64_t> counts(65536, 0);
  std::uint32_t prev = data[0];
  for (std::size_t i = 1; i < data.size(); ++i) {
    const std::uint32_t b = data[i];
    ++counts[(prev << 8) | b];
    prev = b;
  }
  std::vector<PairCount> out;
  for (std::uint32_t p = 0; p < 65536; ++p) {
    if (counts[p] != 0) out.push_back({static_cast<BytePair>(p), counts[p]});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PairCount& a, const PairCount& b) { return a.count > b.count; });
  return out;
}

double bfbc_expected_mean(std::span<const PairCount> frequencies,
                          std::span<const std::size_t> chosen, std::uint64_t length,
                          std::uint64_t min_chunk) {
  double sum = 0.0;
  for (std::size_t idx : chosen) sum += static_cast<double>(frequencies[idx].count);
  return static_cast<double>(length) / (1.0 + sum) + static_cast<double>(min_chunk);
}

std::shared_ptr<const DivisorSet> bfbc_divisors(std::vector<PairCount> frequencies,
                                                double mu, std::uint64_t length,
                                                std::uint64_t min_chunk) {
  if (frequencies.empty()) throw Error(ErrorCode::kDomain, "bfbc: frequency list is empty");
  if (length == 0) throw Error(ErrorCode::kDomain, "bfbc: length must be > 0");
  for (std::size_t i = 1; i < frequencies.size(); ++i) {
    if (frequencies[i].count > frequencies[i - 1].count) {
      throw Error(ErrorCode::kDomain, "bfbc: frequency list must be sorted descending");
    }
  }
  const double l = static_cast<double>(length);
  const double lambda = static_cast<double>(min_chunk);
  auto mean_for = [&](double sum) { return l / (1.0 + sum) + lambda; };

  std::vector<std::size_t> chosen;
  double sum = 0.0;
  for (std::size_t i = 0; i < frequencies.size(); ++i) {
    const double f = static_cast<double>(frequencies[i].count);
    if (f == 0.0) continue;
    if (chosen.empty()) {
      if (mean_for(f) >= mu) {
        chosen.push_back(i);
        sum = f;
      }
    } else if (std::abs(mu - mean_for(sum + f)) < std::abs(mu - mean_for(sum))) {
      chosen.push_back(i);
      sum += f;
    }
  }
  if (chosen.empty()) {
    throw Error(ErrorCode::kTuning, "bfbc: no divisor reaches the target; divisor set is empty");
  }
  return std::make_shared<const DivisorSet>(std::move(frequencies), std::move(chosen));
}

// ---------------------------------------------------------------------------
// Spec resolution

namespace {

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  std::uint64_t v = 0;
  const char* first = value.data();
  const char* last = first + value.size();
  int base = 10;
  if (value.size() > 2 && value[0] == '0' && (value[1] == 'x' || value[1] == 'X')) {
    first += 2;
    base = 16;
  }
  auto [ptr, ec] = std::from_chars(first, last, v, base);
  if (ec != std::errc() || ptr != last || first == last) {
    throw Error(ErrorCode::kConfig, "override '" + key + "': not an unsigned integer: '" + value + "'");
  }
  return v;
}

std::uint32_t parse_u32(const std::string& key, const std::string& value) {
  const std::uint64_t v = parse_u64(key, value);
  if (v > std::numeric_limits<std::uint32_t>::max()) {
    throw Error(ErrorCode::kConfig, "override '" + key + "': value too large");
  }
  return static_cast<std::uint32_t>(v);
}

std::string canonical_key(const std::string& key) {
  static const std::map<std::string, std::string> kAliases = {
      {"w", "window"},         {"window", "window"},
      {"b", "mask_bits"},      {"mask_bits", "mask_bits"},
      {"h", "horizon"},        {"horizon", "horizon"},
      {"theta", "threshold"},  {"threshold", "threshold"},
      {"x", "nc_level"},       {"nc_level", "nc_level"},
      {"nc", "nc_level"},      {"lambda_min", "min_chunk"},
      {"min", "min_chunk"},    {"min_chunk", "min_chunk"},
      {"fixed", "fixed_size"}, {"fixed_size", "fixed_size"},
      {"width", "hash_width"}, {"hash_width", "hash_width"},
      {"k", "k"},              {"table_seed", "table_seed"},
  };
  auto it = kAliases.find(key);
  if (it == kAliases.end()) throw Error(ErrorCode::kConfig, "unknown override key '" + key + "'");
  return it->second;
}

const std::vector<PairCount>& require_frequencies(std::span<const std::uint8_t> sample,
                                                  std::optional<std::vector<PairCount>>& cache) {
  if (!cache) {
    if (sample.size() < 2) {
      throw Error(ErrorCode::kConfig, "bfbc: frequency analysis needs input data");
    }
    cache = pair_frequencies(sample);
  }
  return *cache;
}

}  // namespace

ResolvedSpec resolve_spec(Algorithm alg, std::uint64_t mu, const Overrides& overrides,
                          std::span<const std::uint8_t> sample, const PciTuneOptions& pci) {
  ResolvedSpec out;
  ChunkerSpec& spec = out.spec;
  ChunkerParams& p = spec.params;
  spec.algorithm = alg;
  spec.target_size = mu;
  if (mu < kMinTargetSize || mu > kMaxTargetSize) {
    throw Error(ErrorCode::kConfig, "target size must lie in [64, 2^30]");
  }

  std::map<std::string, std::string> ov;
  for (const auto& [k, v] : overrides) {
    if (!ov.emplace(canonical_key(k), v).second) {
      throw Error(ErrorCode::kConfig, "override '" + k + "' duplicates another key");
    }
  }
  std::set<std::string> used;
  auto has = [&](const char* key) {
    if (ov.count(key) == 0) return false;
    used.insert(key);
    return true;
  };
  auto mark = [&](const char* key, Provenance prov) {
    out.provenance[key] = std::string(provenance_name(has(key) ? Provenance::kOverride : prov));
  };
  if (has("table_seed")) {
    spec.table_seed = parse_u64("table_seed", ov["table_seed"]);
    out.provenance["table_seed"] = "override";
  }

  switch (alg) {
    case Algorithm::kFsc:
      p.fixed_size = has("fixed_size") ? parse_u64("fixed_size", ov["fixed_size"]) : mu;
      mark("fixed_size", Provenance::kFixed);
      break;

    case Algorithm::kBswRabin:
    case Algorithm::kBswBuzhash: {
      p.window = has("window") ? parse_u32("window", ov["window"]) : kBswWindow;
      mark("window", Provenance::kTable);
      if (has("mask_bits")) {
        p.mask_bits = parse_u32("mask_bits", ov["mask_bits"]);
      } else {
        if (mu <= *p.window) throw Error(ErrorCode::kConfig, "bsw: target must exceed the window");
        p.mask_bits = round_log2(static_cast<double>(mu - *p.window));
      }
      mark("mask_bits", Provenance::kFormula);
      break;
    }

    case Algorithm::kBswGear:
    case Algorithm::kGearNc:
      p.mask_bits = has("mask_bits") ? parse_u32("mask_bits", ov["mask_bits"])
                                     : round_log2(static_cast<double>(mu));
      mark("mask_bits", Provenance::kFormula);
      if (has("hash_width")) {
        p.hash_width = parse_u32("hash_width", ov["hash_width"]);
        mark("hash_width", Provenance::kFixed);
      }
      if (alg == Algorithm::kGearNc) {
        p.nc_level = has("nc_level") ? parse_u32("nc_level", ov["nc_level"]) : kDefaultNcLevel;
        mark("nc_level", Provenance::kFixed);
      }
      break;

    case Algorithm::kAe:
      if (has("horizon")) {
        p.horizon = parse_u64("horizon", ov["horizon"]);
        mark("horizon", Provenance::kOverride);
      } else {
        const AeHorizon h = ae_h_for_target(mu);
        p.horizon = h.horizon;
        out.approximate = h.approximate;
        mark("horizon", h.provenance);
      }
      break;

    case Algorithm::kRam:
      p.horizon = has("horizon") ? parse_u64("horizon", ov["horizon"])
                                 : ram_h_for_target(static_cast<double>(mu));
      mark("horizon", Provenance::kFormula);
      break;

    case Algorithm::kMii:
      p.window = has("window") ? parse_u32("window", ov["window"])
                               : mii_w_for_target(static_cast<double>(mu));
      mark("window", Provenance::kFormula);
      break;

    case Algorithm::kPci: {
      if (has("window") && has("threshold")) {
        p.window = parse_u32("window", ov["window"]);
        p.threshold = parse_u32("threshold", ov["threshold"]);
      } else if (has("window") || has("threshold")) {
        throw Error(ErrorCode::kConfig, "pci: override window and threshold together");
      } else if (auto row = pci.simulate ? std::nullopt : pci_table_lookup(mu)) {
        p.window = row->window;
        p.threshold = row->threshold;
      } else {
        const PciTuneResult tuned = pci_tune(mu, pci);
        p.window = tuned.params.window;
        p.threshold = tuned.params.threshold;
        mark("window", Provenance::kSimulation);
        mark("threshold", Provenance::kSimulation);
        break;
      }
      mark("window", Provenance::kTable);
      mark("threshold", Provenance::kTable);
      break;
    }

    case Algorithm::kBfbc:
    case Algorithm::kBfbcStar: {
      std::optional<std::vector<PairCount>> cache;
      const bool star = alg == Algorithm::kBfbcStar;
      if (has("min_chunk")) {
        p.min_chunk = parse_u64("min_chunk", ov["min_chunk"]);
      } else {
        p.min_chunk = star ? 0 : (mu > kBfbcMinOffset ? mu - kBfbcMinOffset : 0);
      }
      mark("min_chunk", star ? Provenance::kFixed : Provenance::kFormula);
      const auto& freq = require_frequencies(sample, cache);
      if (star) {
        if (has("k")) throw Error(ErrorCode::kConfig, "bfbc-star: k is not applicable");
        p.divisors = bfbc_divisors(freq, static_cast<double>(mu), sample.size(), *p.min_chunk);
      } else {
        const std::size_t k = has("k") ? parse_u64("k", ov["k"]) : kBfbcTopK;
        if (k == 0) throw Error(ErrorCode::kConfig, "bfbc: k must be >= 1");
        p.divisors = top_k_divisors(freq, k);
      }
      out.provenance["divisors"] = std::string(provenance_name(Provenance::kFrequencyAnalysis));
      break;
    }
  }
  for (const auto& [k, v] : ov) {
    if (used.count(k) == 0) {
      throw Error(ErrorCode::kConfig, std::string(algorithm_name(alg)) + ": override '" + k +
                                          "' is not applicable");
    }
  }
  spec.validate();
  return out;
}

}  // namespace cdc
