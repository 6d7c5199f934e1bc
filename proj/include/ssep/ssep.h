#ifndef SSEP_SSEP_H
#define SSEP_SSEP_H

/* C interface to the exclusion-process toolkit.
 *
 * Every call returns an ssep_status; on failure ssep_last_error() describes the
 * problem (thread-local, valid until the next failing call on the same thread).
 * Handles are opaque and owned by the caller, who releases them with the
 * matching destroy function. Strings returned through ssep_row and ssep_check
 * stay valid until the owning result is destroyed. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(SSEP_BUILDING_LIBRARY)
#    define SSEP_API __declspec(dllexport)
#  else
#    define SSEP_API __declspec(dllimport)
#  endif
#else
#  define SSEP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ssep_status {
  SSEP_OK = 0,
  SSEP_ERR_DOMAIN = 1,    /* argument outside the mathematical domain */
  SSEP_ERR_SIZE = 2,      /* problem too large for the requested method */
  SSEP_ERR_NUMERICAL = 3, /* tolerance not reached */
  SSEP_ERR_CONFIG = 4,    /* invalid configuration or profile */
  SSEP_ERR_IO = 5,
  SSEP_ERR_ARGUMENT = 6,  /* null handle or pointer, index out of range */
  SSEP_ERR_INTERNAL = 7
} ssep_status;

typedef struct ssep_config ssep_config;
typedef struct ssep_result ssep_result;

typedef struct ssep_row {
  const char* experiment;
  int n;
  double b;           /* NaN when not applicable */
  double t;           /* NaN when not applicable */
  const char* quantity;
  double value;
  double uncertainty;
  const char* method;
  int stochastic;
  uint64_t seed;
  double walltime_ms;
} ssep_row;

typedef struct ssep_check {
  const char* name;
  int pass;
  double margin;
  const char* detail;
} ssep_check;

SSEP_API const char* ssep_version(void);
SSEP_API const char* ssep_last_error(void);
SSEP_API const char* ssep_status_name(ssep_status status);

/* experiment: cutoff, entropy, lemmas, heat, tv or mc */
SSEP_API ssep_status ssep_config_create(const char* experiment, ssep_config** out);
SSEP_API void ssep_config_destroy(ssep_config* cfg);
/* Merges an INI file; later loads and sets override earlier values. */
SSEP_API ssep_status ssep_config_load(ssep_config* cfg, const char* path);
/* key is "section.key", e.g. "grid.n" with value "256, 1024". */
SSEP_API ssep_status ssep_config_set(ssep_config* cfg, const char* key, const char* value);
/* Builds the full configuration without running it. */
SSEP_API ssep_status ssep_config_validate(const ssep_config* cfg);

SSEP_API ssep_status ssep_run(const ssep_config* cfg, ssep_result** out);
SSEP_API void ssep_result_destroy(ssep_result* result);
SSEP_API size_t ssep_result_row_count(const ssep_result* result);
SSEP_API ssep_status ssep_result_row(const ssep_result* result, size_t index, ssep_row* out);
SSEP_API size_t ssep_result_check_count(const ssep_result* result);
SSEP_API ssep_status ssep_result_check(const ssep_result* result, size_t index, ssep_check* out);
/* 1 when every declared predicate passed. */
SSEP_API int ssep_result_all_pass(const ssep_result* result);
/* format: "csv" (table only) or "plot" (table and plot-data files). */
SSEP_API ssep_status ssep_result_write(const ssep_result* result, const char* dir, const char* format);

/* Scalar primitives. */
SSEP_API ssep_status ssep_eigenvalue(int n, int ell, double* out);
SSEP_API ssep_status ssep_cutoff_time(double n, int ell0, double b, double* t, int* clamped);
SSEP_API ssep_status ssep_gaussian_profile(double m, double* out);
/* Total variation between product Bernoulli(u[0..n-2]) and Bernoulli(rho) on n-1 sites,
 * by enumeration (n-1 <= 22) or the certified grid method otherwise. */
SSEP_API ssep_status ssep_product_tv(int n, const double* u, double rho, double* tv, double* error_bound);

#ifdef __cplusplus
}
#endif

#endif /* SSEP_SSEP_H */
