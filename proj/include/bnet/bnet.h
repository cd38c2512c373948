/*
 * Copyright 2026 The BNET Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef BNET_BNET_H
#define BNET_BNET_H

/* C interface of the bnet library.
 *
 * Objects are opaque handles created by the _create or _load functions and
 * released by the matching _destroy. Every function returns a bnet_status; on
 * failure the message of the calling thread's last error is available from
 * bnet_last_error(). Strings are returned through caller buffers: the full
 * length (without the terminator) is stored in *len, and BNET_ERR_BUFFER is
 * returned if it does not fit. A NULL buffer with cap 0 queries the length.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(BNET_BUILDING_LIBRARY)
#    define BNET_API __declspec(dllexport)
#  else
#    define BNET_API __declspec(dllimport)
#  endif
#else
#  define BNET_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bnet_status {
    BNET_OK = 0,
    BNET_ERR_ARGUMENT = 1, /* invalid argument or NULL handle */
    BNET_ERR_CONFIG = 2,   /* bad configuration; see bnet_last_error_key() */
    BNET_ERR_IO = 3,
    BNET_ERR_NUMERIC = 4,
    BNET_ERR_BUFFER = 5,   /* output buffer too small */
    BNET_ERR_INTERNAL = 6
} bnet_status;

typedef struct bnet_config bnet_config;
typedef struct bnet_trainer bnet_trainer;
typedef struct bnet_genome bnet_genome;

typedef struct bnet_run_summary {
    int solved;
    uint64_t steps_to_solve;
    uint64_t env_steps;
    uint64_t solve_check_steps;
    uint64_t iterations;
    double champion_mean;
} bnet_run_summary;

typedef struct bnet_eval_summary {
    uint64_t episodes;
    double mean;
    double min;
    double max;
} bnet_eval_summary;

typedef struct bnet_bench_summary {
    uint64_t runs;
    uint64_t successes;
    uint64_t failures; /* runs that ended with an error */
    double median_steps;
    double q1_steps;
    double q3_steps;
} bnet_bench_summary;

BNET_API const char* bnet_version(void);
BNET_API const char* bnet_status_string(bnet_status status);
/* Message of the last failure on this thread ("" if none). */
BNET_API const char* bnet_last_error(void);
/* Offending key of the last BNET_ERR_CONFIG on this thread ("" if none). */
BNET_API const char* bnet_last_error_key(void);
/* $BNET_OUTPUT_ROOT, or "runs". */
BNET_API bnet_status bnet_output_root(char* buf, size_t cap, size_t* len);

/* Configuration ------------------------------------------------------------ */

BNET_API bnet_status bnet_config_create(bnet_config** out);
BNET_API bnet_status bnet_config_load(const char* path, bnet_config** out);
BNET_API bnet_status bnet_config_parse(const char* ini_text, bnet_config** out);
BNET_API void bnet_config_destroy(bnet_config* config);

/* key is "section.key". */
BNET_API bnet_status bnet_config_set(bnet_config* config, const char* key, const char* value);
/* assignment is "section.key=value". */
BNET_API bnet_status bnet_config_override(bnet_config* config, const char* assignment);
BNET_API bnet_status bnet_config_get(const bnet_config* config, const char* key, char* buf,
                                     size_t cap, size_t* len);
/* Variant after resolving "auto" against the environment's defaults. */
BNET_API bnet_status bnet_config_variant(const bnet_config* config, char* buf, size_t cap,
                                         size_t* len);
BNET_API bnet_status bnet_config_serialize(const bnet_config* config, char* buf, size_t cap,
                                           size_t* len);
/* Git-style blob SHA-1 of the serialized configuration. */
BNET_API bnet_status bnet_config_hash(const bnet_config* config, char* buf, size_t cap,
                                      size_t* len);
/* Checks that every value parses and is in range. */
BNET_API bnet_status bnet_config_validate(const bnet_config* config);
/* Writes the JSON run manifest. Any artifact path may be NULL. */
BNET_API bnet_status bnet_config_write_manifest(const bnet_config* config, const char* path,
                                                const char* trace_path,
                                                const char* selection_path,
                                                const char* checkpoint_path,
                                                const char* trajectory_path);

/* Training ----------------------------------------------------------------- */

BNET_API bnet_status bnet_trainer_create(const bnet_config* config, bnet_trainer** out);
BNET_API void bnet_trainer_destroy(bnet_trainer* trainer);

/* Offline initialisation from an experience file; call before the first step. */
BNET_API bnet_status bnet_trainer_import_experience(bnet_trainer* trainer, const char* path);
/* Logs every training step to a CSV file; call before the first step. */
BNET_API bnet_status bnet_trainer_log_trajectories(bnet_trainer* trainer, const char* path);
/* One iteration; *more is set to 0 when training has finished. */
BNET_API bnet_status bnet_trainer_step(bnet_trainer* trainer, int* more);
/* Runs until solved or out of budget. */
BNET_API bnet_status bnet_trainer_run(bnet_trainer* trainer, bnet_run_summary* out);
BNET_API bnet_status bnet_trainer_summary(const bnet_trainer* trainer, bnet_run_summary* out);
BNET_API bnet_status bnet_trainer_write_trace(const bnet_trainer* trainer, const char* path);
BNET_API bnet_status bnet_trainer_write_selection(const bnet_trainer* trainer, const char* path);
/* Writes the elite experience archive. */
BNET_API bnet_status bnet_trainer_export_experience(const bnet_trainer* trainer, const char* path);
/* Copy of the current (or solving) champion; fails before the first iteration. */
BNET_API bnet_status bnet_trainer_champion(const bnet_trainer* trainer, bnet_genome** out);

/* Genomes ------------------------------------------------------------------ */

BNET_API bnet_status bnet_genome_load(const char* path, bnet_genome** out);
BNET_API bnet_status bnet_genome_save(const bnet_genome* genome, const char* path);
BNET_API bnet_status bnet_genome_info(const bnet_genome* genome, size_t* n_inputs,
                                      size_t* n_outputs, size_t* active_nodes);
BNET_API void bnet_genome_destroy(bnet_genome* genome);

/* Deterministic evaluation on the environment described by `config`. */
BNET_API bnet_status bnet_evaluate(const bnet_genome* genome, const bnet_config* config,
                                   uint64_t episodes, uint64_t seed, bnet_eval_summary* out);
/* Records deterministic episodes of `genome` as an experience file. */
BNET_API bnet_status bnet_record_experience(const bnet_genome* genome, const bnet_config* config,
                                            uint64_t episodes, uint64_t seed, const char* path);

/* Benchmark ---------------------------------------------------------------- */

/* Independent runs for each seed on `workers` threads. runs_csv and
 * summary_csv may be NULL. */
BNET_API bnet_status bnet_bench(const bnet_config* config, const uint64_t* seeds, size_t n_seeds,
                                size_t workers, const char* runs_csv, const char* summary_csv,
                                bnet_bench_summary* out);

#ifdef __cplusplus
}
#endif

#endif /* BNET_BNET_H */
