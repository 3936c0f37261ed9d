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

#ifndef CDC_TUNING_HPP_
#define CDC_TUNING_HPP_

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cdc/chunkers.hpp"
#include "cdc/core.hpp"

namespace cdc {

// ---------------------------------------------------------------------------
// Distribution of M_h, the maximum of h independent uniform bytes.
//
//   F(m)              = ((m+1)/256)^h
//   P(M_h = m)        = ((m+1)/256)^h - (m/256)^h
//   P(M_h = m | >= x) = ((m-x+1)/(256-x))^h - ((m-x)/(256-x))^h,  m >= x
//
// All functions throw Error(kDomain) for h < 1 or m, x outside [0, 255].
// ---------------------------------------------------------------------------

double mh_cdf(std::uint64_t h, int m);
double mh_pmf(std::uint64_t h, int m);
double mh_pmf_conditioned(std::uint64_t h, int m, int x);
double mh_expectation(std::uint64_t h);

struct MhDistribution {
  std::uint64_t horizon = 0;
  std::optional<int> lower_bound;
  std::array<double, 256> pmf{};

  double cdf(int m) const;
  double expectation() const;
};

MhDistribution mh_distribution(std::uint64_t h, std::optional<int> lower_bound = {});

// ---------------------------------------------------------------------------
// Per-algorithm parameter selection.
// ---------------------------------------------------------------------------

enum class Provenance {
  kTable,
  kFormula,
  kInterpolated,
  kSimulation,
  kFrequencyAnalysis,
  kFixed,
  kOverride,
};

std::string_view provenance_name(Provenance p);

struct AeHorizon {
  std::uint64_t horizon = 0;
  Provenance provenance = Provenance::kTable;
  bool approximate = false;
};

// Empirical table below 2 KiB, mu - 256 from 2 KiB on, linear interpolation
// (flagged approximate) in between table points. mu < 512 is unsupported.
AeHorizon ae_h_for_target(std::uint64_t mu);

// mu(h) = h + (1 - E[M_h]/256)^-1
double ram_mu_of_h(std::uint64_t h);
// Integer h minimising |ram_mu_of_h(h) - mu|.
std::uint64_t ram_h_for_target(double mu);

// mu(w) = 256^w / C(256, w) + w, evaluated in log space.
double mii_mu_of_w(std::uint32_t w);
std::uint32_t mii_w_for_target(double mu);

// C(8w, theta) * 2^(-8w): probability that a w-byte window of uniform bytes
// has popcount exactly theta.
double pci_popcount_probability(std::uint32_t w, std::uint32_t theta);

struct PciParams {
  std::uint32_t window = 0;
  std::uint32_t threshold = 0;
};

// Built-in parameters for the common target sizes, found by simulation.
std::optional<PciParams> pci_table_lookup(std::uint64_t mu);

struct PciCandidate {
  std::uint32_t window = 0;
  std::uint32_t threshold = 0;
  double prior = 0;
  double empirical_mean = 0;  // +inf when no cut-point was found
};

struct PciTuneOptions {
  std::uint64_t sim_len = 10'000'000;
  std::uint64_t seed = 0;
  std::uint32_t min_window = 32;
  std::uint32_t max_window = 64;
  // Evaluate every theta in [0, 8w] instead of the binomial-pruned band.
  bool full_grid = false;
  unsigned threads = 0;  // 0: hardware concurrency
  // resolve_spec only: run the tuner even when the table has a row for mu.
  bool simulate = false;
};

struct PciTuneResult {
  PciParams params;
  double empirical_mean = 0;
  std::vector<PciCandidate> evaluated;
};

// Simulates PCI on seeded uniform data for each candidate (w, theta) and
// returns the one whose empirical mean is closest to mu. Throws
// Error(kTuning) if no candidate lands within +-50 % of mu.
PciTuneResult pci_tune(std::uint64_t mu, const PciTuneOptions& options);

// Candidate thetas for one window: popcount probability within
// [1/(4 mu), 4/mu].
std::vector<std::uint32_t> pci_theta_candidates(std::uint64_t mu, std::uint32_t w);

// Overlapping byte-pair counts, descending by count, ties by pair ascending.
// Only pairs that occur are listed.
std::vector<PairCount> pair_frequencies(std::span<const std::uint8_t> data);

// Expected mean chunk size l / (1 + sum of chosen counts) + lambda_min.
double bfbc_expected_mean(std::span<const PairCount> frequencies,
                          std::span<const std::size_t> chosen, std::uint64_t length,
                          std::uint64_t min_chunk);

// Greedy divisor selection: the first pair whose expected mean alone reaches
// mu seeds the set, every later pair joins iff it strictly reduces the
// distance to mu. Zero-count entries are ignored.
std::shared_ptr<const DivisorSet> bfbc_divisors(std::vector<PairCount> frequencies,
                                                double mu, std::uint64_t length,
                                                std::uint64_t min_chunk);

inline constexpr std::size_t kBfbcTopK = 3;
inline constexpr std::uint64_t kBfbcMinOffset = 128;
inline constexpr std::uint32_t kBswWindow = 32;
inline constexpr std::uint32_t kDefaultNcLevel = 2;

using Overrides = std::map<std::string, std::string>;

struct ResolvedSpec {
  ChunkerSpec spec;
  // Parameter name -> provenance name.
  std::map<std::string, std::string> provenance;
  bool approximate = false;
};

// Builds a fully parameterised spec for `alg` at target mu. Explicit
// overrides win over tuned values; derived values (e.g. BSW mask bits from
// an overridden window) are recomputed from the overrides. `sample` is the
// data the frequency analysis runs on (BFBC, BFBC*).
ResolvedSpec resolve_spec(Algorithm alg, std::uint64_t mu, const Overrides& overrides,
                          std::span<const std::uint8_t> sample = {},
                          const PciTuneOptions& pci = {});

}  // namespace cdc

#endif  // CDC_TUNING_HPP_
