#ifndef CHANSPARSE_H
#define CHANSPARSE_H

/* Generated by cbindgen. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

#define CS_MODE_EQUAL 0

#define CS_MODE_ICK 1

#define CS_VARIANT_WITH_LOS 0

#define CS_VARIANT_WITHOUT_LOS 1

#define CS_SITUATION_ORDER_PRESERVED 0

#define CS_SITUATION_ORDER_CHANGED 1

typedef enum CsStatus {
  CS_STATUS_OK = 0,
  CS_STATUS_NULL_POINTER = 1,
  CS_STATUS_INVALID_ARGUMENT = 2,
  CS_STATUS_EMPTY_INPUT = 3,
  CS_STATUS_NONPOSITIVE_POWER = 4,
  CS_STATUS_NO_LOS_RAY = 5,
  CS_STATUS_UNDEFINED = 6,
  CS_STATUS_BUFFER_TOO_SMALL = 7,
  CS_STATUS_PANIC = 8,
} CsStatus;

/**
 * Opaque drop handle.
 */
typedef struct CsRealization CsRealization;

/**
 * Opaque sweep summary handle.
 */
typedef struct CsSweep CsSweep;

/**
 * One ray as copied out of a realization. `cluster` is -1 when unknown.
 */
typedef struct CsRay {
  double delay_s;
  double power;
  double aoa_az_deg;
  double aoa_el_deg;
  bool is_los;
  int64_t cluster;
} CsRay;

typedef struct CsTheoremReport {
  double g1;
  double gk;
  double delta;
  /**
   * One of the `CS_SITUATION_*` constants.
   */
  uint32_t situation;
  bool holds;
} CsTheoremReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failure on this thread, or null. The pointer stays
 * valid until the next failing call on the same thread.
 */
const char *cs_last_error(void);

/**
 * Static description of a status code. Takes a plain integer so that an
 * out-of-range value from C is not undefined behaviour.
 */
const char *cs_status_str(int32_t status);

/**
 * Gini index of `len` positive powers.
 *
 * # Safety
 * `powers` must point to `len` readable doubles and `out` to one writable.
 */
enum CsStatus cs_gini(const double *powers, size_t len, double *out);

/**
 * Splits `cluster_power` over `m` rays with ICK `ick`, dominant ray first.
 *
 * # Safety
 * `out` must point to `m` writable doubles.
 */
enum CsStatus cs_allocate_ick(double cluster_power, size_t m, double ick, double *out);

/**
 * ICK of one cluster's ray powers.
 *
 * # Safety
 * `powers` must point to `len` readable doubles and `out` to one writable.
 */
enum CsStatus cs_estimate_ick(const double *powers, size_t len, double *out);

/**
 * Generates drop `drop_index` of preset band `band` (`"cmWave"`, `"mmWave"`
 * or `"subTHz"`) with default generator settings and `seed`.
 *
 * # Safety
 * `band` must be a NUL-terminated string and `out` writable.
 */
enum CsStatus cs_realization_generate(const char *band,
                                      uint32_t mode,
                                      uint64_t seed,
                                      uint64_t drop_index,
                                      struct CsRealization **out);

/**
 * # Safety
 * `r` must come from [`cs_realization_generate`] and not be used afterwards.
 */
void cs_realization_free(struct CsRealization *r);

/**
 * Number of rays, or 0 for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
size_t cs_realization_ray_count(const struct CsRealization *r);

/**
 * # Safety
 * `r` must be null or a live handle.
 */
bool cs_realization_has_los(const struct CsRealization *r);

/**
 * Copies the rays into `out`, which holds `cap` entries.
 *
 * # Safety
 * `r` must be a live handle and `out` point to `cap` writable entries.
 */
enum CsStatus cs_realization_rays(const struct CsRealization *r, struct CsRay *out, size_t cap);

/**
 * Gini index of the realization with or without its LoS ray.
 *
 * # Safety
 * `r` must be a live handle and `out` writable.
 */
enum CsStatus cs_realization_gini(const struct CsRealization *r, uint32_t variant, double *out);

/**
 * Compares equal and ICK allocation for strictly ascending cluster powers.
 *
 * # Safety
 * `powers` must point to `n` readable doubles and `out` be writable.
 */
enum CsStatus cs_verify_theorem(const double *powers,
                                size_t n,
                                size_t m_rays,
                                double ick,
                                struct CsTheoremReport *out);

/**
 * Runs a randomized sweep of `cases` instances.
 *
 * # Safety
 * `out` must be writable.
 */
enum CsStatus cs_sweep_run(size_t cases, uint64_t seed, struct CsSweep **out);

/**
 * # Safety
 * `s` must come from [`cs_sweep_run`] and not be used afterwards.
 */
void cs_sweep_free(struct CsSweep *s);

/**
 * # Safety
 * `s` must be null or a live handle.
 */
size_t cs_sweep_counterexamples(const struct CsSweep *s);

/**
 * # Safety
 * `s` must be null or a live handle.
 */
size_t cs_sweep_order_preserved(const struct CsSweep *s);

/**
 * # Safety
 * `s` must be null or a live handle.
 */
size_t cs_sweep_order_changed(const struct CsSweep *s);

/**
 * Smallest `G_k − G_1` seen; NaN for a null handle.
 *
 * # Safety
 * `s` must be null or a live handle.
 */
double cs_sweep_min_delta(const struct CsSweep *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CHANSPARSE_H */
