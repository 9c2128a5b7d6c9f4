#ifndef TEMPERED_GEOMETRY_H
#define TEMPERED_GEOMETRY_H

#include <stddef.h>

/**
 * Outcome of an FFI call.
 */
typedef enum TgStatus {
  TG_STATUS_OK = 0,
  TG_STATUS_NULL_POINTER = 1,
  TG_STATUS_INVALID_TEMPERATURE = 2,
  TG_STATUS_DOMAIN = 3,
  TG_STATUS_DIMENSION = 4,
  TG_STATUS_TEMPERATURE_MISMATCH = 5,
  TG_STATUS_OUTSIDE_DOMAIN = 6,
  TG_STATUS_NO_CONVERGENCE = 7,
  TG_STATUS_PANIC = 8,
  TG_STATUS_OTHER = 9,
} TgStatus;

/**
 * Opaque handle to a point of the tempered co-simplex.
 */
typedef struct TgPoint TgPoint;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread; valid until the next failing call.
 */
const char *tg_last_error(void);

/**
 * # Safety
 * `out` must be a writable double.
 */
enum TgStatus tg_log_t(double x, double t, double *out);

/**
 * # Safety
 * `out` must be a writable double.
 */
enum TgStatus tg_exp_t(double y, double t, double *out);

/**
 * # Safety
 * `out` must be a writable double.
 */
enum TgStatus tg_t_add(double a, double b, double t, double *out);

/**
 * # Safety
 * `out` must be a writable double.
 */
enum TgStatus tg_t_sub(double a, double b, double t, double *out);

/**
 * A point from co-simplex values (their co-densities must sum to one).
 *
 * # Safety
 * `values` must point to `len` doubles and `out` must be writable.
 */
enum TgStatus tg_point_new(const double *values, size_t len, double t, struct TgPoint **out);

/**
 * A point from a probability vector.
 *
 * # Safety
 * `probs` must point to `len` doubles and `out` must be writable.
 */
enum TgStatus tg_point_from_probability(const double *probs,
                                        size_t len,
                                        double t,
                                        struct TgPoint **out);

/**
 * The co-simplex point on the ray of a positive vector.
 *
 * # Safety
 * `raw` must point to `len` doubles and `out` must be writable.
 */
enum TgStatus tg_point_from_raw(const double *raw, size_t len, double t, struct TgPoint **out);

/**
 * Releases a handle; null is ignored.
 *
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void tg_point_free(struct TgPoint *p);

/**
 * # Safety
 * `p` must be a live handle and `out` writable.
 */
enum TgStatus tg_point_dim(const struct TgPoint *p, size_t *out);

/**
 * Copies the co-simplex values into `buf`, which must hold exactly the point's dimension.
 *
 * # Safety
 * `p` must be a live handle and `buf` must point to `len` writable doubles.
 */
enum TgStatus tg_point_values(const struct TgPoint *p, double *buf, size_t len);

/**
 * # Safety
 * `p`, `q` must be live handles and `out` writable.
 */
enum TgStatus tg_hilbert(const struct TgPoint *p, const struct TgPoint *q, double *out);

/**
 * # Safety
 * `p`, `q` must be live handles and `out` writable.
 */
enum TgStatus tg_funk(const struct TgPoint *p, const struct TgPoint *q, double *out);

/**
 * Tempered Hilbert distance between the rays of two positive vectors.
 *
 * # Safety
 * `p`, `q` must point to `len` doubles and `out` must be writable.
 */
enum TgStatus tg_hilbert_raw(const double *p, const double *q, size_t len, double t, double *out);

/**
 * Differentiable tempered Hilbert distance with smoothing `smoothing` and max-temperature
 * mismatch `delta` (0 for none).
 *
 * # Safety
 * `p`, `q` must be live handles and `out` writable.
 */
enum TgStatus tg_diff_hilbert(const struct TgPoint *p,
                              const struct TgPoint *q,
                              double smoothing,
                              double delta,
                              double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TEMPERED_GEOMETRY_H */
