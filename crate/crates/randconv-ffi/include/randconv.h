#ifndef RANDCONV_H
#define RANDCONV_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code of every FFI call.
 */
typedef enum RcStatus {
  Ok = 0,
  NullArgument = 1,
  InvalidDistribution = 2,
  /**
   * The pair falls outside the regime the operation covers
   * (for example both distributions uniform).
   */
  RegimeUnsupported = 3,
  /**
   * Arguments were readable but the computation refused them
   * (search space too large, bad confidence level, ...).
   */
  ComputeFailed = 4,
  /**
   * An output buffer is shorter than required.
   */
  BufferTooSmall = 5,
} RcStatus;

/**
 * Conversion regime of a pair, mirrored into the C ABI.
 */
typedef enum RcRegime {
  SourceUniform = 0,
  TargetUniform = 1,
  RatioGreater = 2,
  RatioLess = 3,
  RatioEqual = 4,
} RcRegime;

/**
 * Opaque handle to a finite distribution.
 */
typedef struct RcDist RcDist;

/**
 * Second-order rate record. `c_pq` and `threshold` are NaN when the
 * regime does not define them.
 */
typedef struct RcRateResult {
  double a;
  double r2;
  enum RcRegime regime;
  double c_pq;
  double threshold;
  double residual;
} RcRateResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Creates a distribution handle from `len` probabilities.
 *
 * # Safety
 * `probs` must point to `len` readable doubles and `out` must be writable.
 */
enum RcStatus rc_dist_new(const double *probs, uintptr_t len, struct RcDist **out);

/**
 * Frees a handle created by [`rc_dist_new`]. A null pointer is a no-op.
 *
 * # Safety
 * `dist` must be a handle from `rc_dist_new` that has not been freed.
 */
void rc_dist_free(struct RcDist *dist);

/**
 * Entropy in nats.
 *
 * # Safety
 * `dist` must be a live handle; `out` must be writable.
 */
enum RcStatus rc_entropy(const struct RcDist *dist, double *out);

/**
 * Varentropy in nats².
 *
 * # Safety
 * `dist` must be a live handle; `out` must be writable.
 */
enum RcStatus rc_varentropy(const struct RcDist *dist, double *out);

/**
 * Bhattacharyya fidelity of two distributions on a common index set.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RcStatus rc_fidelity(const struct RcDist *a, const struct RcDist *b, double *out);

/**
 * One-shot majorization optimum F^M(source → target).
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RcStatus rc_max_fidelity_major(const struct RcDist *source,
                                    const struct RcDist *target,
                                    double *out);

/**
 * Exhaustive deterministic optimum F^D(source → target) and its map.
 * `map_out` must hold one entry per source outcome.
 *
 * # Safety
 * Handles must be live; `fidelity_out` and `map_out[0..map_len]` writable.
 */
enum RcStatus rc_max_fidelity_det(const struct RcDist *source,
                                  const struct RcDist *target,
                                  double *fidelity_out,
                                  uintptr_t *map_out,
                                  uintptr_t map_len);

/**
 * F^M(P^n → Q^L) on i.i.d. powers via the block optimizer.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RcStatus rc_fm_iid_power(const struct RcDist *source,
                              const struct RcDist *target,
                              uint64_t n,
                              uint64_t l,
                              double *out);

/**
 * Largest L with F^M(P^n → Q^L) ≥ nu.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RcStatus rc_fm_copy_count(const struct RcDist *source,
                               const struct RcDist *target,
                               uint64_t n,
                               double nu,
                               uint64_t *out);

/**
 * Limit of the conversion fidelity at rates (a, b).
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RcStatus rc_limit_fidelity(const struct RcDist *source,
                                const struct RcDist *target,
                                double a,
                                double b,
                                double *out);

/**
 * Second-order rate record at confidence `nu`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RcStatus rc_second_order_rate(const struct RcDist *source,
                                   const struct RcDist *target,
                                   double nu,
                                   struct RcRateResult *out);

/**
 * Copy-count expansion a·n + r2·√n at confidence `nu`.
 *
 * # Safety
 * Handles must be live; `out` must be writable.
 */
enum RcStatus rc_ldn_expand(const struct RcDist *source,
                            const struct RcDist *target,
                            double nu,
                            uint64_t n,
                            double *out);

/**
 * Static description of a status code.
 */
const char *rc_status_name(enum RcStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* RANDCONV_H */
