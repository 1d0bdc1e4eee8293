#ifndef PEQS_PEQS_H
#define PEQS_PEQS_H

/* C interface to the precision-error QAOA simulation library.
 *
 * Every function returns a peqs_status; PEQS_OK means success.  On failure
 * peqs_last_error() holds a message for the current thread, valid until the
 * next failing call on that thread.  Strings handed out through char** are
 * owned by the caller and released with peqs_string_free(). */

#include <stdint.h>

#if defined(_WIN32)
#define PEQS_API __declspec(dllexport)
#else
#define PEQS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum peqs_status {
    PEQS_OK = 0,
    PEQS_ERR_INVALID_ARGUMENT = 1, /* bad config / bad parameter */
    PEQS_ERR_CAPACITY = 2,         /* problem size exceeds a hard cap */
    PEQS_ERR_IO = 3,               /* file missing, unwritable, or malformed */
    PEQS_ERR_WINDOW = 4,           /* fit window selected no usable points */
    PEQS_ERR_OPTIMIZATION = 5,     /* angle optimizer missed its target */
    PEQS_ERR_TRUNCATION = 6,       /* series truncation outside its regime */
    PEQS_ERR_INTERNAL = 7          /* anything else */
} peqs_status;

/* Opaque experiment configuration (a parsed JSON document plus overrides). */
typedef struct peqs_config peqs_config;

typedef struct peqs_run_summary {
    char* csv_path;  /* peqs_string_free() */
    char* meta_path; /* peqs_string_free() */
    uint64_t rows;
    uint64_t skipped;    /* rows carrying a skipped_reason */
    uint64_t violations; /* invariant violations recorded in the metadata */
} peqs_run_summary;

PEQS_API const char* peqs_version(void);

/* Message from the last failing call on this thread ("" when none). */
PEQS_API const char* peqs_last_error(void);

PEQS_API peqs_status peqs_config_load(const char* path, peqs_config** out);
PEQS_API peqs_status peqs_config_parse(const char* json_text, peqs_config** out);

/* Patch one field: dotted key path, value parsed as JSON (comma-separated
 * values become an array; unparseable text becomes a string). */
PEQS_API peqs_status peqs_config_override(peqs_config* config, const char* key,
                                          const char* value);

/* Validate without running; canonical JSON echo written to *canonical_out
 * (optional, may be NULL) and the config hash to *hash_out (optional). */
PEQS_API peqs_status peqs_config_validate(const peqs_config* config, char** canonical_out,
                                          char** hash_out);

PEQS_API void peqs_config_free(peqs_config* config);

PEQS_API peqs_status peqs_run_sweep(const peqs_config* config, peqs_run_summary* out);
PEQS_API peqs_status peqs_run_bounds(const peqs_config* config, peqs_run_summary* out);
PEQS_API peqs_status peqs_run_digitization(const peqs_config* config, peqs_run_summary* out);

/* Releases the strings inside a summary (the struct itself is caller-owned). */
PEQS_API void peqs_run_summary_clear(peqs_run_summary* summary);

/* Fit a scaling law to a sweep CSV.
 *   kind:     exp-decay | squared-exp | power-law | saturation |
 *             layer-growth | unitary-distance
 *   x_axis:   gamma_p | eta_p | eta2_p, or NULL for the kind's default
 *   window:   NULL or [x_min, x_max]
 *   n_filter: NULL, or a single problem size to keep
 * The fit document (JSON) lands in *json_out.  A window that selects no
 * usable points is not an error: *flagged_out is set to 1 and the document
 * carries the message. */
PEQS_API peqs_status peqs_run_fit(const char* csv_path, const char* kind, const char* x_axis,
                                  const double* window, const int* n_filter, double saturation,
                                  char** json_out, int* flagged_out);

/* Optimal-angle report for the ring problem at size n (JSON). */
PEQS_API peqs_status peqs_optimal_angles(int n, char** json_out);

PEQS_API void peqs_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif /* PEQS_PEQS_H */
