/* abfinsler: spacetime-condition verification, fundamental tensors and
 * isometries of (alpha,beta)-type Finsler structures.
 *
 * C API: opaque handles, status codes, JSON in / JSON out. All functions are
 * thread-safe as long as each handle is used from one thread at a time.
 */
#ifndef ABF_ABFINSLER_H
#define ABF_ABFINSLER_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum abf_status {
  ABF_OK = 0,
  ABF_E_PARSE = 1,
  ABF_E_VALIDATION = 2,
  ABF_E_DEGENERATE_METRIC = 3,
  ABF_E_S_ON_LIGHT_CONE = 4,
  ABF_E_DOMAIN = 5,
  ABF_E_UNSUPPORTED_FAMILY = 6,
  ABF_E_STENCIL_OUT_OF_DOMAIN = 7,
  ABF_E_SINGULAR_TENSOR = 8,
  ABF_E_SINGULAR_BASE = 9,
  ABF_E_SINGULAR_UPDATE = 10,
  ABF_E_EMPTY_CONE = 11,
  ABF_E_INVALID_PARAMS = 12,
  ABF_E_DEGENERATE_FIT = 13,
  ABF_E_INTERNAL = 14
} abf_status;

/* Model: parsed and validated run configuration (fields, Psi family, points,
 * sampling parameters). Created from the JSON configuration documented in the
 * README. */
typedef struct abf_model abf_model;

/* Report: the JSON result of one run, plus an exit verdict and optional CSV. */
typedef struct abf_report abf_report;

const char* abf_version(void);
const char* abf_status_name(abf_status status);

/* Message for the most recent failing call on this thread. */
const char* abf_last_error(void);

abf_status abf_model_create(const char* config_json, abf_model** out);
void abf_model_destroy(abf_model* model);

/* Fundamental tensor, determinant (closed form and numeric oracle), inverse
 * and signature at one (x, v); arrays of length dim. */
abf_status abf_run_tensor(abf_model* model, const double* x, const double* v, size_t dim,
                          abf_report** out);

/* Analytic classification (per probe point; <b,b> is computed, not asserted). */
abf_status abf_run_classify(abf_model* model, abf_report** out);

/* Cone sampling against the spacetime conditions. */
abf_status abf_run_check(abf_model* model, abf_report** out);

/* Killing-field residuals, trivial/nontrivial classification. */
abf_status abf_run_killing(abf_model* model, abf_report** out);

/* The acceptance suite; independent of any model. */
abf_status abf_run_selftest(uint64_t seed, abf_report** out);

/* Borrowed pointers, valid until abf_report_destroy. */
const char* abf_report_json(const abf_report* report);
const char* abf_report_csv(const abf_report* report); /* NULL when no tabular payload */
/* 0 = yes/corroborated, 1 = no/falsified */
int abf_report_verdict(const abf_report* report);
void abf_report_destroy(abf_report* report);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* ABF_ABFINSLER_H */
