#ifndef FRACTAL_SFT_H
#define FRACTAL_SFT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  FSFT_STATUS_OK = 0,
  FSFT_STATUS_MALFORMED = 1,
  FSFT_STATUS_HYPOTHESIS = 2,
  FSFT_STATUS_VERIFY_FAILED = 3,
  FSFT_STATUS_NULL_POINTER = 4,
  FSFT_STATUS_INVALID_UTF8 = 5,
  FSFT_STATUS_PANIC = 6,
} FsftStatus;

/**
 * Finite-type classification codes of the univoque shift.
 */
typedef enum {
  FSFT_CLASSIFICATION_SFT_INTERIOR_HIT = 0,
  FSFT_CLASSIFICATION_SFT_RIGHT_ENDPOINT_HIT = 1,
  FSFT_CLASSIFICATION_NOT_SFT_LEFT_ENDPOINT_HIT = 2,
  FSFT_CLASSIFICATION_NOT_SFT_NEVER_HITS = 3,
  FSFT_CLASSIFICATION_UNRESOLVED = 4,
} FsftClassification;

/**
 * Opaque β-system handle.
 */
typedef struct FsftBeta FsftBeta;

/**
 * Opaque doubling-map hole handle.
 */
typedef struct FsftHole FsftHole;

/**
 * Opaque IFS handle.
 */
typedef struct FsftIfs FsftIfs;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string; do not free.
 */
const char *fsft_version(void);

/**
 * Message of the last failure on this thread, or NULL. Free with `fsft_string_free`.
 */
char *fsft_last_error_message(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void fsft_string_free(char *s);

/**
 * Runs a JSON request (the format accepted by `--sweep`, one object) and
 * returns the JSON report and the CLI exit code.
 *
 * # Safety
 * `request` must be a NUL-terminated string; `report` and `exit_code` must be valid for writes.
 */
FsftStatus fsft_run_json(const char *request, char **report, int32_t *exit_code);

/**
 * Builds the β-system for the real root in (1, 2) of the integer polynomial
 * with ascending coefficients `coeffs[0..len]`.
 *
 * # Safety
 * `coeffs` must point to `len` readable values; `out` must be valid for writes.
 */
FsftStatus fsft_beta_new(const int64_t *coeffs, uintptr_t len, FsftBeta **out);

/**
 * # Safety
 * `h` must come from `fsft_beta_new` and not have been freed; NULL is ignored.
 */
void fsft_beta_free(FsftBeta *h);

/**
 * Classifies the univoque shift; `bound` = 0 uses the default orbit bound.
 *
 * # Safety
 * `h` must be a live handle and `out` valid for writes.
 */
FsftStatus fsft_beta_classify(const FsftBeta *h,
                              uintptr_t bound,
                              FsftClassification *out,
                              uintptr_t *step);

/**
 * Hausdorff dimension of the univoque set; `bound` = 0 uses the default.
 *
 * # Safety
 * `h` must be a live handle and `out` valid for writes.
 */
FsftStatus fsft_beta_dimension(const FsftBeta *h, uintptr_t bound, double *out);

/**
 * Loads an IFS from its JSON description.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` valid for writes.
 */
FsftStatus fsft_ifs_from_json(const char *json, FsftIfs **out);

/**
 * # Safety
 * `h` must come from `fsft_ifs_from_json` and not have been freed; NULL is ignored.
 */
void fsft_ifs_free(FsftIfs *h);

/**
 * dim K and dim U of an exactly overlapping IFS.
 *
 * # Safety
 * `h` must be a live handle; `dim_k` and `dim_u` valid for writes.
 */
FsftStatus fsft_ifs_dimensions(const FsftIfs *h, double *dim_k, double *dim_u);

/**
 * Hole [a_num/a_den, b_num/b_den) for the doubling map.
 *
 * # Safety
 * `out` must be valid for writes.
 */
FsftStatus fsft_hole_new(int64_t a_num,
                         int64_t a_den,
                         int64_t b_num,
                         int64_t b_den,
                         FsftHole **out);

/**
 * # Safety
 * `h` must come from `fsft_hole_new` and not have been freed; NULL is ignored.
 */
void fsft_hole_free(FsftHole *h);

/**
 * Hausdorff dimension of the survivor set; 0 when it is countable.
 *
 * # Safety
 * `h` must be a live handle and `out` valid for writes.
 */
FsftStatus fsft_hole_dimension(const FsftHole *h, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACTAL_SFT_H */
