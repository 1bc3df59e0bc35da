#ifndef CIRCLEFORGE_H
#define CIRCLEFORGE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/*
 Result of every fallible call.
 */
typedef enum CfStatus {
  CF_STATUS_OK = 0,
  CF_STATUS_PRECONDITION = 2,
  CF_STATUS_BUDGET = 3,
  CF_STATUS_CONVERGENCE = 4,
  CF_STATUS_CACHE = 5,
  CF_STATUS_IO = 6,
  CF_STATUS_NULL_POINTER = 7,
  CF_STATUS_PANIC = 8,
} CfStatus;

/*
 Opaque exact counts `R(1..=X)`.
 */
typedef struct CfRangeCounts CfRangeCounts;

/*
 Opaque pair spectrum.
 */
typedef struct CfSpectrum CfSpectrum;

/*
 One prediction record, as returned by [`cf_predict`].
 */
typedef struct CfPrediction {
  uint64_t n;
  uint64_t r;
  double s_w;
  double tail_estimate;
  double main;
  double abs_err;
  double rel_err;
} CfPrediction;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message of the last failure on this thread, or null. Valid until the next
 failing call on the same thread.
 */
const char *cf_last_error(void);

/*
 `(27/32) 2^(1/3) Gamma(4/3)^6`.
 */
double cf_leading_constant(void);

/*
 `S_k(q,a)`.

 # Safety
 `re` and `im` must be valid for writes.
 */
enum CfStatus cf_gauss_sum(uint32_t k, uint64_t q, uint64_t a, double *re, double *im);

/*
 `w_k(q)`.

 # Safety
 `out` must be valid for writes.
 */
enum CfStatus cf_wk_majorant(uint32_t k, uint64_t q, double *out);

/*
 `A(q;n)`.

 # Safety
 `out` must be valid for writes.
 */
enum CfStatus cf_series_term(uint64_t q, int64_t n, double *out);

/*
 `S(n;W)` and `|S(n;2W) - S(n;W)|`.

 # Safety
 `value` and `tail` must be valid for writes.
 */
enum CfStatus cf_singular_series(uint64_t n, uint64_t w, double *value, double *tail);

/*
 Number of solutions modulo `q`, split into low and high 64-bit words.

 # Safety
 `lo` and `hi` must be valid for writes.
 */
enum CfStatus cf_congruence_count(uint64_t q, int64_t n, uint64_t *lo, uint64_t *hi);

/*
 Exact `R(n)`.

 # Safety
 `out` must be valid for writes.
 */
enum CfStatus cf_rep_count(uint64_t n, uint64_t *out);

/*
 Builds the pair spectrum of `k`-th powers up to `p`.

 # Safety
 `out` must be valid for writes. The handle is freed with [`cf_spectrum_free`].
 */
enum CfStatus cf_spectrum_new(uint32_t k, uint64_t p, struct CfSpectrum **out);

/*
 Reads a spectrum cache file.

 # Safety
 `path` must be a NUL-terminated string and `out` valid for writes.
 */
enum CfStatus cf_spectrum_read(const char *path, struct CfSpectrum **out);

/*
 Writes a spectrum cache file.

 # Safety
 `s` must be a live handle and `path` a NUL-terminated string.
 */
enum CfStatus cf_spectrum_write(const struct CfSpectrum *s, const char *path);

/*
 Number of entries, `2 P^k + 1`; zero for a null handle.

 # Safety
 `s` must be null or a live handle.
 */
uint64_t cf_spectrum_len(const struct CfSpectrum *s);

/*
 Count of pairs with `x^k + y^k = m`; zero beyond the end.

 # Safety
 `s` must be a live handle and `out` valid for writes.
 */
enum CfStatus cf_spectrum_get(const struct CfSpectrum *s, uint64_t m, uint32_t *out);

/*
 # Safety
 `s` must be null or a handle not yet freed.
 */
void cf_spectrum_free(struct CfSpectrum *s);

/*
 Exact `R(n)` for `1 <= n <= x`.

 # Safety
 `out` must be valid for writes. The handle is freed with [`cf_range_counts_free`].
 */
enum CfStatus cf_range_counts_new(uint64_t x, struct CfRangeCounts **out);

/*
 The bound `X`; zero for a null handle.

 # Safety
 `r` must be null or a live handle.
 */
uint64_t cf_range_counts_limit(const struct CfRangeCounts *r);

/*
 `R(n)` for `1 <= n <= X`.

 # Safety
 `r` must be a live handle and `out` valid for writes.
 */
enum CfStatus cf_range_counts_get(const struct CfRangeCounts *r, uint64_t n, uint64_t *out);

/*
 # Safety
 `r` must be null or a handle not yet freed.
 */
void cf_range_counts_free(struct CfRangeCounts *r);

/*
 Solutions of `y1^6 + y2^6 = y3^6 + y4^6` in `[1, p6]`.

 # Safety
 `out` must be valid for writes.
 */
enum CfStatus cf_count_i2(uint64_t p6, uint64_t *out);

/*
 Solutions of `x1^3 - x2^3 = y1^6 + y2^6 - y3^6 - y4^6` at scale `x`.

 # Safety
 `out` must be valid for writes.
 */
enum CfStatus cf_count_i1(uint64_t x, uint64_t *out);

/*
 Solutions of `y1^6 + ... + y4^6 = y5^6 + ... + y8^6` in `[1, p6]`.

 # Safety
 `out` must be valid for writes.
 */
enum CfStatus cf_hua_moment8(uint64_t p6, uint64_t *out);

/*
 `sum_{1 <= x <= p} e(alpha x^k)` for `alpha` in `[0, 1)`.

 # Safety
 `re` and `im` must be valid for writes.
 */
enum CfStatus cf_weyl_sum(uint32_t k, uint64_t p, double alpha, double *re, double *im);

/*
 As [`cf_weyl_sum`] at the exact point `num / den`.

 # Safety
 `re` and `im` must be valid for writes.
 */
enum CfStatus cf_weyl_sum_rational(uint32_t k,
                                   uint64_t p,
                                   uint64_t num,
                                   uint64_t den,
                                   double *re,
                                   double *im);

/*
 `int_0^p e(beta t^k) dt`.

 # Safety
 `re` and `im` must be valid for writes.
 */
enum CfStatus cf_vk_integral(uint32_t k, double p, double beta, double *re, double *im);

/*
 Prediction record for `n >= 6` at truncation `w`.

 # Safety
 `out` must be valid for writes.
 */
enum CfStatus cf_predict(uint64_t n, uint64_t w, struct CfPrediction *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRCLEFORGE_H */
