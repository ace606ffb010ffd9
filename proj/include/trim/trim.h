/*
 * Copyright (C) 2026 The trim authors
 * SPDX-License-Identifier: Apache-2.0
 */

/*
 * C interface to the trim token-reduction library.
 *
 * Objects are opaque handles owned by the caller and released with the
 * matching *_free function (NULL is accepted). Every fallible call returns a
 * trim_status; on failure trim_last_error() describes the most recent error
 * raised on the calling thread. Pointers returned by getters borrow from the
 * handle and stay valid until it is freed.
 *
 * Functions producing text follow the snprintf convention: they write at most
 * `capacity` bytes including the terminating NUL, always store the full
 * length (without NUL) in *length when it is non-NULL, and return
 * TRIM_ERR_BUFFER_TOO_SMALL when the text did not fit. Passing buffer = NULL
 * and capacity = 0 is a valid size query.
 */

#ifndef TRIM_TRIM_H
#define TRIM_TRIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(TRIM_BUILDING_LIBRARY)
#    define TRIM_API __declspec(dllexport)
#  else
#    define TRIM_API __declspec(dllimport)
#  endif
#else
#  define TRIM_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum trim_status {
    TRIM_OK = 0,
    TRIM_ERR_INVALID_ARGUMENT = 1,
    TRIM_ERR_IO = 2,
    TRIM_ERR_BAD_MAGIC = 3,
    TRIM_ERR_UNSUPPORTED = 4,
    TRIM_ERR_MALFORMED_HEADER = 5,
    TRIM_ERR_TRUNCATED = 6,
    TRIM_ERR_TRAILING_DATA = 7,
    TRIM_ERR_DIMS_OVERFLOW = 8,
    TRIM_ERR_NON_FINITE = 9,
    TRIM_ERR_DIMENSION_MISMATCH = 10,
    TRIM_ERR_ZERO_NORM = 11,
    TRIM_ERR_SHAPE = 12,
    TRIM_ERR_OUT_OF_RANGE = 13,
    TRIM_ERR_PARSE = 14,
    TRIM_ERR_BUFFER_TOO_SMALL = 15,
    TRIM_ERR_INTERNAL = 16
} trim_status;

TRIM_API const char* trim_status_string(trim_status status);
TRIM_API const char* trim_last_error(void);
TRIM_API const char* trim_version(void);

/* ---- matrices and tensor files ------------------------------------------ */

typedef struct trim_matrix trim_matrix;

/* Copies rows * cols floats from `data`. */
TRIM_API trim_status trim_matrix_create(size_t rows, size_t cols, const float* data, trim_matrix** out);
TRIM_API trim_status trim_matrix_read(const char* path, trim_matrix** out);
TRIM_API trim_status trim_matrix_write(const trim_matrix* m, const char* path);
TRIM_API void trim_matrix_free(trim_matrix* m);

TRIM_API size_t trim_matrix_rows(const trim_matrix* m);
TRIM_API size_t trim_matrix_cols(const trim_matrix* m);
TRIM_API const float* trim_matrix_data(const trim_matrix* m);

/* ---- significance scoring ----------------------------------------------- */

typedef struct trim_scores trim_scores;

/* `text` must be a single row whose width matches `image_tokens`. */
TRIM_API trim_status trim_score_tokens(const trim_matrix* image_tokens, const trim_matrix* text, trim_scores** out);
TRIM_API void trim_scores_free(trim_scores* s);

TRIM_API size_t trim_scores_count(const trim_scores* s);
TRIM_API const double* trim_scores_raw(const trim_scores* s);
TRIM_API const double* trim_scores_softmax(const trim_scores* s);

/* Side of the square patch grid, or TRIM_ERR_SHAPE if count is not square. */
TRIM_API trim_status trim_grid_side(size_t n_tokens, size_t* side);
TRIM_API trim_status trim_scores_grid_text(const trim_scores* s, size_t side, char* buffer, size_t capacity,
                                           size_t* length);
/* Binary P5 graymap; not NUL-terminated, *length is the byte count. */
TRIM_API trim_status trim_scores_grid_pgm(const trim_scores* s, size_t side, uint8_t* buffer, size_t capacity,
                                          size_t* length);

/* ---- selection ----------------------------------------------------------- */

typedef enum trim_strategy_kind {
    TRIM_STRATEGY_IQR = 0,
    TRIM_STRATEGY_TOPK = 1,
    TRIM_STRATEGY_RANDOM = 2,
    TRIM_STRATEGY_POOL = 3
} trim_strategy_kind;

typedef struct trim_strategy {
    trim_strategy_kind kind;
    double ratio;  /* budget fraction in (0, 1]; ignored by IQR */
    uint64_t seed; /* RANDOM only */
} trim_strategy;

/* Parses "iqr", "topk:R", "random:R:SEED" or "pool:R". */
TRIM_API trim_status trim_strategy_parse(const char* text, trim_strategy* out);

typedef struct trim_selection trim_selection;

TRIM_API trim_status trim_select(const trim_scores* scores, const trim_strategy* strategy, trim_selection** out);
/* IQR rule applied to an arbitrary score vector. */
TRIM_API trim_status trim_select_iqr_values(const double* scores, size_t n, trim_selection** out);
TRIM_API void trim_selection_free(trim_selection* sel);

TRIM_API trim_strategy_kind trim_selection_strategy(const trim_selection* sel);
TRIM_API size_t trim_selection_count(const trim_selection* sel);
TRIM_API const size_t* trim_selection_indices(const trim_selection* sel);
TRIM_API size_t trim_selection_total(const trim_selection* sel);
/* Returns 1 and stores the IQR upper bound when present, else 0. */
TRIM_API int trim_selection_threshold(const trim_selection* sel, double* threshold);
TRIM_API trim_status trim_selection_retained_mass(const trim_selection* sel, const trim_scores* scores,
                                                  double* mass);
/* JSON object: strategy, threshold, n_total, indices. */
TRIM_API trim_status trim_selection_json(const trim_selection* sel, char* buffer, size_t capacity, size_t* length);
TRIM_API trim_status trim_selection_text(const trim_selection* sel, char* buffer, size_t capacity, size_t* length);

/* ---- reduction ----------------------------------------------------------- */

typedef struct trim_reduced trim_reduced;

TRIM_API trim_status trim_reduce(const trim_matrix* source, const trim_selection* sel, trim_reduced** out);
/* Scores, selects and reduces in one call; any output pointer may be NULL. */
TRIM_API trim_status trim_run_pipeline(const trim_matrix* image_tokens, const trim_matrix* text,
                                       const trim_strategy* strategy, trim_scores** scores, trim_selection** sel,
                                       trim_reduced** reduced);
TRIM_API void trim_reduced_free(trim_reduced* r);

/* Borrowed; owned by `r`. */
TRIM_API const trim_matrix* trim_reduced_tokens(const trim_reduced* r);
TRIM_API int trim_reduced_has_aggregate(const trim_reduced* r);
TRIM_API size_t trim_reduced_source_count(const trim_reduced* r);
TRIM_API size_t trim_reduced_kept_count(const trim_reduced* r);
TRIM_API const size_t* trim_reduced_kept_indices(const trim_reduced* r);

/* Writes the tensor file and the JSON sidecar (kept_indices, has_aggregate,
 * source_n, n_rows, strategy, threshold). */
TRIM_API trim_status trim_reduced_write(const trim_reduced* r, const trim_selection* sel, const char* tensor_path,
                                        const char* sidecar_path);
/* Reads back source_n and n_rows from a sidecar written above. */
TRIM_API trim_status trim_sidecar_read(const char* sidecar_path, uint64_t* source_n, uint64_t* n_rows);

/* ---- cost model ---------------------------------------------------------- */

typedef enum trim_precision { TRIM_PRECISION_FP16 = 0, TRIM_PRECISION_INT8 = 1 } trim_precision;

typedef struct trim_model_spec {
    char name[64];
    uint64_t n_params;
    uint64_t n_layers;
    uint64_t d_model;
    uint64_t n_kv_heads;
    uint64_t d_head;
    uint32_t bytes_per_param; /* 2 = FP16, 1 = INT8 */
    double vision_overhead_flops;
} trim_model_spec;

typedef struct trim_hardware_spec {
    char name[64];
    double peak_flops;    /* FLOP/s */
    double mem_bandwidth; /* bytes/s */
} trim_hardware_spec;

typedef struct trim_cost_point {
    uint64_t n_tokens;
    uint64_t kv_cache_bytes;
    uint64_t weights_bytes;
    double first_token_ms;
    double next_token_ms;
} trim_cost_point;

typedef struct trim_cost_report {
    trim_cost_point baseline;
    trim_cost_point reduced;
    double token_ratio;
    double kv_cache_ratio;
    double memory_ratio; /* weights + KV cache */
    double first_token_ratio;
    double next_token_ratio;
} trim_cost_report;

/* "llava-1.5-7b", "llava-1.5-13b" / "v100". */
TRIM_API trim_status trim_model_preset(const char* name, trim_model_spec* out);
TRIM_API trim_status trim_hardware_preset(const char* name, trim_hardware_spec* out);
TRIM_API trim_status trim_model_spec_load(const char* path, trim_model_spec* out);
TRIM_API trim_status trim_hardware_spec_load(const char* path, trim_hardware_spec* out);
TRIM_API trim_status trim_parse_precision(const char* text, trim_precision* out);
TRIM_API void trim_model_set_precision(trim_model_spec* spec, trim_precision precision);

TRIM_API trim_status trim_kv_cache_bytes(const trim_model_spec* model, uint64_t n_tokens, uint64_t* bytes);
TRIM_API trim_status trim_first_token_ms(const trim_model_spec* model, const trim_hardware_spec* hw,
                                         uint64_t n_tokens, double* ms);
TRIM_API trim_status trim_next_token_ms(const trim_model_spec* model, const trim_hardware_spec* hw,
                                        uint64_t n_cached, double* ms);
TRIM_API trim_status trim_compare_costs(const trim_model_spec* model, const trim_hardware_spec* hw,
                                        uint64_t baseline_tokens, uint64_t reduced_tokens, trim_cost_report* out);
TRIM_API trim_status trim_cost_report_json(const trim_model_spec* model, const trim_hardware_spec* hw,
                                           const trim_cost_report* report, char* buffer, size_t capacity,
                                           size_t* length);
TRIM_API trim_status trim_cost_report_text(const trim_model_spec* model, const trim_hardware_spec* hw,
                                           const trim_cost_report* report, char* buffer, size_t capacity,
                                           size_t* length);

#ifdef __cplusplus
}
#endif

#endif /* TRIM_TRIM_H */
