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

/* C interface to the chunking library. All objects are opaque handles that
 * the caller releases with the matching *_destroy function; memory returned
 * through out-pointers (strings, buffers, record arrays) is released with
 * cdc_free. Every fallible call returns a cdc_status; on failure
 * cdc_last_error() describes the problem for the calling thread. */

#ifndef CDC_CDC_H_
#define CDC_CDC_H_

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define CDC_API __attribute__((visibility("default")))

typedef enum cdc_status {
  CDC_OK = 0,
  CDC_ERR_CONFIG = 1,
  CDC_ERR_IO = 2,
  CDC_ERR_TUNING = 3,
  CDC_ERR_DOMAIN = 4,
  CDC_ERR_STATE = 5,
  CDC_ERR_EMPTY = 6,
  CDC_ERR_INVALID_ARGUMENT = 7,
  CDC_ERR_INTERNAL = 8
} cdc_status;

typedef struct cdc_spec cdc_spec;
typedef struct cdc_stream cdc_stream;
typedef struct cdc_index cdc_index;

typedef struct cdc_chunk {
  uint64_t ordinal;
  uint64_t length;
  uint64_t end; /* absolute boundary position (exclusive end offset) */
  uint8_t fingerprint[32];
  int has_fingerprint;
  int trailing;
} cdc_chunk;

typedef void (*cdc_chunk_fn)(void* ctx, const cdc_chunk* chunk);

typedef struct cdc_pci_options {
  uint64_t sim_len;   /* 0: 10 MB */
  uint64_t seed;
  int full_grid;
  unsigned threads;   /* 0: hardware concurrency */
  int simulate;       /* ignore the built-in table and always tune */
} cdc_pci_options;

typedef struct cdc_throughput {
  double median_mibps;
  double iqr_mibps;
  uint32_t repetitions;
  uint64_t sum_of_sizes;
  uint64_t input_bytes;
} cdc_throughput;

CDC_API const char* cdc_version(void);
CDC_API const char* cdc_last_error(void);
CDC_API void cdc_free(void* p);

/* --- chunker specs ------------------------------------------------------ */

/* Resolves tuned parameters for `algorithm` at target size `target`.
 * `overrides` is NULL or a comma-separated list of key=value pairs. `sample`
 * feeds the byte-pair frequency analysis of bfbc / bfbc-star and may be NULL
 * for other algorithms. `pci` may be NULL. */
CDC_API cdc_status cdc_spec_resolve(const char* algorithm, uint64_t target,
                                    const char* overrides, const uint8_t* sample,
                                    size_t sample_len, const cdc_pci_options* pci,
                                    cdc_spec** out);
CDC_API void cdc_spec_destroy(cdc_spec* spec);
/* Effective parameters and their provenance as a JSON object. */
CDC_API cdc_status cdc_spec_json(const cdc_spec* spec, char** out_json);

/* --- streaming ---------------------------------------------------------- */

CDC_API cdc_status cdc_stream_create(const cdc_spec* spec, int fingerprint,
                                     cdc_stream** out);
CDC_API void cdc_stream_destroy(cdc_stream* stream);
/* Feeds one block; `fn` (may be NULL) is called once per completed chunk. */
CDC_API cdc_status cdc_stream_push(cdc_stream* stream, const uint8_t* data, size_t len,
                                   cdc_chunk_fn fn, void* ctx);
/* Emits the trailing chunk (possibly empty). The stream is unusable after. */
CDC_API cdc_status cdc_stream_finalize(cdc_stream* stream, cdc_chunk* trailing);
CDC_API uint64_t cdc_stream_bytes_consumed(const cdc_stream* stream);
CDC_API uint64_t cdc_stream_chunks_emitted(const cdc_stream* stream);

/* --- tuning ------------------------------------------------------------- */

CDC_API cdc_status cdc_mh_cdf(uint64_t h, int m, double* out);
CDC_API cdc_status cdc_mh_pmf(uint64_t h, int m, double* out);
CDC_API cdc_status cdc_mh_pmf_conditioned(uint64_t h, int m, int x, double* out);
CDC_API cdc_status cdc_ae_h_for_target(uint64_t target, uint64_t* h, int* approximate);
CDC_API cdc_status cdc_ram_mu_of_h(uint64_t h, double* mu);
CDC_API cdc_status cdc_ram_h_for_target(double target, uint64_t* h);
CDC_API cdc_status cdc_mii_mu_of_w(uint32_t w, double* mu);
CDC_API cdc_status cdc_mii_w_for_target(double target, uint32_t* w);
CDC_API cdc_status cdc_pci_tune(uint64_t target, const cdc_pci_options* options,
                                uint32_t* w, uint32_t* theta, double* mean);

/* --- analysis ----------------------------------------------------------- */

CDC_API cdc_status cdc_index_create(cdc_index** out);
CDC_API void cdc_index_destroy(cdc_index* index);
CDC_API cdc_status cdc_index_ingest(cdc_index* index, const cdc_chunk* chunk);
CDC_API cdc_status cdc_index_merge(cdc_index* into, const cdc_index* from);
CDC_API cdc_status cdc_index_totals(const cdc_index* index, uint64_t* bytes_seen,
                                    uint64_t* bytes_unique, double* dedup_ratio);

/* StatsSummary of the non-trailing records as JSON. bucket_width 0 selects
 * target / 64. */
CDC_API cdc_status cdc_summarize_json(const cdc_chunk* records, size_t count,
                                      uint64_t bucket_width, uint64_t target,
                                      char** out_json);
CDC_API cdc_status cdc_throughput_run(const cdc_spec* spec, const uint8_t* data,
                                      size_t len, uint32_t repetitions,
                                      size_t block_size, cdc_throughput* out);
/* Reads a chunk CSV file written by `cdcbench chunk`. */
CDC_API cdc_status cdc_read_chunk_csv(const char* path, cdc_chunk** records,
                                      size_t* count);

/* --- datasets ----------------------------------------------------------- */

/* Name of the PRNG behind cdc_generate_random, for output metadata. */
CDC_API const char* cdc_random_generator(void);
CDC_API cdc_status cdc_generate_random(uint64_t seed, uint64_t offset, uint8_t* out,
                                       size_t len);
CDC_API cdc_status cdc_concat_corpus(const char* const* paths, size_t path_count,
                                     uint8_t** data, size_t* len, char** manifest_json);
CDC_API cdc_status cdc_sha256(const uint8_t* data, size_t len, uint8_t out[32]);

#ifdef __cplusplus
}
#endif

#endif /* CDC_CDC_H_ */
