/*
 * fvsm — C API for the patent feature-vector space modeling library.
 *
 * The library turns a JSON-lines patent corpus into trained models and flat
 * artifacts (CSV/JSON/SVG) inside an output directory. All heavy lifting
 * happens behind an opaque pipeline handle; every call returns a status code
 * and the handle keeps the message of the last failure.
 *
 * Typical use:
 *
 *   fvsm_pipeline* p = NULL;
 *   fvsm_pipeline_new(&p);
 *   fvsm_pipeline_load_config(p, "run.cfg");
 *   fvsm_pipeline_set(p, "seed", "7");
 *   if (fvsm_pipeline_run(p, "run-all") != FVSM_OK)
 *       fprintf(stderr, "%s\n", fvsm_pipeline_last_error(p));
 *   fvsm_pipeline_free(p);
 *
 * Stages: "ingest", "label", "train", "extract", "triads", "cluster", "map",
 * "run-all". Configuration keys are documented in the project README.
 */

#ifndef FVSM_H
#define FVSM_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum fvsm_status {
  FVSM_OK = 0,
  FVSM_ERR_INVALID_ARGUMENT = 1, /* bad parameter or contract violation */
  FVSM_ERR_IO = 2,               /* missing/corrupt files, artifacts, locks */
  FVSM_ERR_BUFFER_TOO_SMALL = 3, /* out buffer cannot hold the result */
  FVSM_ERR_INTERNAL = 4          /* anything else */
} fvsm_status;

/* Library version string, e.g. "0.1.0". */
const char* fvsm_version(void);

/* Stable name of a status code, e.g. "FVSM_ERR_IO". */
const char* fvsm_status_name(fvsm_status status);

/* ------------------------------------------------------------------ */
/* Pipeline                                                            */

typedef struct fvsm_pipeline fvsm_pipeline;

/* Allocates a pipeline with default configuration. Free with
 * fvsm_pipeline_free. Returns FVSM_ERR_INVALID_ARGUMENT on NULL. */
fvsm_status fvsm_pipeline_new(fvsm_pipeline** out_pipeline);

void fvsm_pipeline_free(fvsm_pipeline* pipeline);

/* Applies "key = value" lines from a config file. */
fvsm_status fvsm_pipeline_load_config(fvsm_pipeline* pipeline, const char* path);

/* Overrides a single configuration key; unknown keys are rejected. */
fvsm_status fvsm_pipeline_set(fvsm_pipeline* pipeline, const char* key, const char* value);

/* Copies the current value of a key into buffer (NUL-terminated). out_size,
 * when non-NULL, receives the value length excluding the terminator; on
 * FVSM_ERR_BUFFER_TOO_SMALL it receives the required buffer size. */
fvsm_status fvsm_pipeline_get(const fvsm_pipeline* pipeline, const char* key, char* buffer,
                              size_t buffer_size, size_t* out_size);

/* Runs one stage (or "run-all"). Artifacts land in the configured output
 * directory. */
fvsm_status fvsm_pipeline_run(fvsm_pipeline* pipeline, const char* stage);

/* Message of the last failed call on this handle; empty string if none.
 * Owned by the handle, valid until the next call on it. */
const char* fvsm_pipeline_last_error(const fvsm_pipeline* pipeline);

/* ------------------------------------------------------------------ */
/* Stateless helpers                                                   */

/* Porter-stems a lowercase word into buffer (NUL-terminated). */
fvsm_status fvsm_porter_stem(const char* word, char* buffer, size_t buffer_size,
                             size_t* out_size);

/* Similarity between two equal-length vectors. measure is one of
 * "euclidean", "cosine", "jaccard". */
fvsm_status fvsm_similarity(const char* measure, const double* x, const double* y, size_t dim,
                            double* out_value);

#ifdef __cplusplus
}
#endif

#endif /* FVSM_H */
