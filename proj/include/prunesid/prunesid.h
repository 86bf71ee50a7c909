#ifndef PRUNESID_H
#define PRUNESID_H

/*
 * C interface to the prunesid visual-token compression engine.
 *
 * Objects are opaque handles created by the library and released with the
 * matching *_free function. Every fallible call returns a prunesid_status;
 * on failure a human-readable message is available from
 * prunesid_last_error() on the same thread until the next failing call.
 * Strings returned through char** are owned by the caller and released with
 * prunesid_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PRUNESID_BUILDING_LIBRARY)
#    define PRUNESID_API __declspec(dllexport)
#  else
#    define PRUNESID_API __declspec(dllimport)
#  endif
#else
#  define PRUNESID_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct prunesid_matrix prunesid_matrix;
typedef struct prunesid_result prunesid_result;

typedef enum {
    PRUNESID_OK = 0,
    PRUNESID_ERROR_INVALID_ARGUMENT = 1, /* null handles, out-of-range parameters */
    PRUNESID_ERROR_INVALID_INPUT = 2,    /* non-finite or empty matrices */
    PRUNESID_ERROR_FORMAT = 3,           /* malformed TOKM / CSV / manifest */
    PRUNESID_ERROR_IO = 4,               /* unreadable or unwritable paths */
    PRUNESID_ERROR_GUARD = 5,            /* desk-scale limit of an exhaustive oracle */
    PRUNESID_ERROR_INTERNAL = 6
} prunesid_status;

typedef enum { PRUNESID_FORMAT_TOKM = 0, PRUNESID_FORMAT_CSV = 1 } prunesid_format;

typedef enum { PRUNESID_SIMILARITY_RAW = 0, PRUNESID_SIMILARITY_RESCALED = 1 } prunesid_similarity;

typedef struct {
    uint64_t groups; /* 0 = floor(budget / 4), clamped to the matrix */
    double alpha;    /* lambda = budget / alpha */
    uint64_t seed;
    prunesid_similarity similarity;
    int32_t svd_iters;
    int32_t strict; /* nonzero: reject out-of-range group counts instead of clamping */
} prunesid_config;

typedef struct {
    double rho;
    double phi;
    double tau;
    double lambda;
    uint64_t groups;
    uint64_t retained;
    int32_t identity; /* budget >= token count, every token kept */
} prunesid_stats;

typedef struct {
    const char* manifest_path;
    uint64_t avg_budget;  /* 0 = take it from the manifest */
    int32_t dynamic;      /* -1 = manifest setting, 0 = fixed, 1 = dynamic */
    uint64_t min_budget;  /* 0 = manifest setting */
    uint64_t jobs;
    const char* out_dir;
    int32_t include_timing;
} prunesid_batch_options;

PRUNESID_API const char* prunesid_version(void);
PRUNESID_API const char* prunesid_last_error(void);
PRUNESID_API void prunesid_string_free(char* text);

PRUNESID_API void prunesid_config_init(prunesid_config* config);
PRUNESID_API void prunesid_batch_options_init(prunesid_batch_options* options);

/* Matrices (row-major, tokens x dims). */
PRUNESID_API prunesid_status prunesid_matrix_create(const double* values, uint64_t tokens, uint64_t dims,
                                                    prunesid_matrix** out);
PRUNESID_API prunesid_status prunesid_matrix_create_f32(const float* values, uint64_t tokens, uint64_t dims,
                                                        prunesid_matrix** out);
PRUNESID_API prunesid_status prunesid_matrix_read(const char* path, prunesid_format format, prunesid_matrix** out);
PRUNESID_API prunesid_status prunesid_matrix_write(const prunesid_matrix* matrix, const char* path,
                                                   prunesid_format format);
PRUNESID_API uint64_t prunesid_matrix_tokens(const prunesid_matrix* matrix);
PRUNESID_API uint64_t prunesid_matrix_dims(const prunesid_matrix* matrix);
PRUNESID_API void prunesid_matrix_free(prunesid_matrix* matrix);

/* Redundancy and information score of one image. */
PRUNESID_API prunesid_status prunesid_information_score(const prunesid_matrix* matrix, prunesid_similarity source,
                                                        double* rho, double* phi);

/* Compression. */
PRUNESID_API prunesid_status prunesid_compress(const prunesid_matrix* matrix, uint64_t budget,
                                               const prunesid_config* config, prunesid_result** out);
PRUNESID_API prunesid_status prunesid_result_stats(const prunesid_result* result, prunesid_stats* out);
/* Copies up to `capacity` retained indices (ascending); `count` receives the full length. */
PRUNESID_API prunesid_status prunesid_result_retained(const prunesid_result* result, uint64_t* indices,
                                                      size_t capacity, size_t* count);
PRUNESID_API prunesid_status prunesid_result_report_json(const prunesid_result* result, const char* image_id,
                                                         int32_t include_timing, char** json);
PRUNESID_API prunesid_status prunesid_result_write_report(const prunesid_result* result, const char* image_id,
                                                          const char* path, int32_t include_timing);
PRUNESID_API void prunesid_result_free(prunesid_result* result);

/* Dataset-level budgets proportional to phi; `caps` may be NULL. */
PRUNESID_API prunesid_status prunesid_allocate_budgets(const double* phis, size_t count, uint64_t target_avg,
                                                       uint64_t n_min, const uint64_t* caps, uint64_t* budgets);

/* Manifest-driven batch run. Writes per-image reports and summary.json into
 * out_dir; `summary_json` (optional) receives the summary. Returns
 * PRUNESID_OK only when every image succeeded. */
PRUNESID_API prunesid_status prunesid_batch_run(const prunesid_batch_options* options, char** summary_json);

/* Objective comparison of compress against random, ascend, descend and the
 * exhaustive optimum over `trials` seeds. */
PRUNESID_API prunesid_status prunesid_oracle_run(const prunesid_matrix* matrix, uint64_t budget, uint64_t trials,
                                                 uint64_t seed, const prunesid_config* config, char** json);

#ifdef __cplusplus
}
#endif

#endif /* PRUNESID_H */
