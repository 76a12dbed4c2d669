#ifndef CPBOOT_H
#define CPBOOT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Null-dataset construction for the interval-length test.
 */
typedef enum CpbNullMethod {
  CPB_NULL_METHOD_DEMEAN = 0,
  CPB_NULL_METHOD_PERMUTE = 1,
} CpbNullMethod;

/**
 * Status codes returned by every fallible function.
 */
typedef enum CpbStatus {
  CPB_STATUS_OK = 0,
  CPB_STATUS_NULL_POINTER = 1,
  CPB_STATUS_INVALID_INPUT = 2,
  CPB_STATUS_IO = 3,
  CPB_STATUS_PARSE = 4,
  CPB_STATUS_NO_ADMISSIBLE_SPLIT = 5,
  CPB_STATUS_BUFFER_TOO_SMALL = 6,
  CPB_STATUS_PANIC = 7,
} CpbStatus;

/**
 * Opaque series handle.
 */
typedef struct CpbSeries CpbSeries;

/**
 * Opaque test report handle.
 */
typedef struct CpbTestReport CpbTestReport;

typedef struct CpbBootstrapConfig {
  size_t b_inner;
  size_t r_outer;
  double alpha_ci;
  uint64_t seed;
  size_t min_segment;
} CpbBootstrapConfig;

typedef struct CpbTestConfig {
  struct CpbBootstrapConfig bootstrap;
  double alpha_test;
  enum CpbNullMethod null_method;
} CpbTestConfig;

typedef struct CpbSegmentFit {
  double beta0;
  double beta1;
  double sigma2_mle;
  size_t m;
} CpbSegmentFit;

typedef struct CpbScanSummary {
  size_t c_hat;
  double max_statistic;
  /**
   * Smallest candidate split; statistics buffers start here.
   */
  size_t first_split;
  /**
   * Number of candidate splits, `n - 2 * min_segment + 1`.
   */
  size_t n_splits;
  struct CpbSegmentFit left_fit;
  struct CpbSegmentFit right_fit;
  struct CpbSegmentFit full_fit;
} CpbScanSummary;

typedef struct CpbInterval {
  double lower;
  double upper;
  double length;
  double level;
} CpbInterval;

typedef struct CpbTestSummary {
  size_t c_hat;
  double t_star;
  double lambda1_point;
  bool reject;
  /**
   * NaN when the median null interval length is zero.
   */
  double q_hat;
  double power;
  /**
   * Length of each lambda sample buffer.
   */
  size_t n_samples;
} CpbTestSummary;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or an empty string.
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *cpb_last_error_message(void);

/**
 * Library version; release with [`cpb_string_free`].
 */
char *cpb_version(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, not yet freed.
 */
void cpb_string_free(char *s);

/**
 * Defaults: 1000 replicates, 200 outer repetitions, alpha 0.05, seed 0,
 * minimum segment 3.
 */
struct CpbBootstrapConfig cpb_bootstrap_config_default(void);

struct CpbTestConfig cpb_test_config_default(void);

/**
 * Build a series from `n` pairs. Pairs need not be ordered; they are sorted
 * stably by `t`.
 *
 * # Safety
 * `t` and `y` must each point at `n` readable doubles; `out` must be writable.
 */
enum CpbStatus cpb_series_new(const double *t, const double *y, size_t n, struct CpbSeries **out);

/**
 * Load a `t,y` CSV file.
 *
 * # Safety
 * `path` must be a NUL-terminated UTF-8 string; `out` must be writable.
 */
enum CpbStatus cpb_series_load_csv(const char *path, struct CpbSeries **out);

/**
 * # Safety
 * `series` must be NULL or a handle from this library, not yet freed.
 */
void cpb_series_free(struct CpbSeries *series);

/**
 * Number of pairs, or 0 for a NULL handle.
 *
 * # Safety
 * `series` must be NULL or a live handle.
 */
size_t cpb_series_len(const struct CpbSeries *series);

/**
 * Copy the `t` and `y` columns into caller buffers of `capacity` doubles.
 *
 * # Safety
 * `series` must be a live handle; `t_out`/`y_out` must hold `capacity` doubles.
 */
enum CpbStatus cpb_series_columns(const struct CpbSeries *series,
                                  double *t_out,
                                  double *y_out,
                                  size_t capacity);

/**
 * Scan every admissible split.
 *
 * # Safety
 * `series` must be a live handle; `out` must be writable.
 */
enum CpbStatus cpb_scan(const struct CpbSeries *series,
                        size_t min_segment,
                        struct CpbScanSummary *out);

/**
 * Per-split log-LRT values starting at split `min_segment`; inadmissible
 * splits are written as NaN. The buffer needs `n - 2 * min_segment + 1` slots.
 *
 * # Safety
 * `series` must be a live handle; `out` must hold `capacity` doubles.
 */
enum CpbStatus cpb_scan_statistics(const struct CpbSeries *series,
                                   size_t min_segment,
                                   double *out,
                                   size_t capacity);

/**
 * Log-LRT of the split after point `k` (one-based).
 *
 * # Safety
 * `series` must be a live handle; `out` must be writable.
 */
enum CpbStatus cpb_lrt_statistic_at(const struct CpbSeries *series,
                                    size_t k,
                                    size_t min_segment,
                                    double *out);

/**
 * Sorted bootstrap changepoint estimates; `out` needs `cfg->b_inner` slots.
 *
 * # Safety
 * `series` and `cfg` must be valid; `out` must hold `capacity` doubles.
 */
enum CpbStatus cpb_bootstrap_distribution(const struct CpbSeries *series,
                                          const struct CpbBootstrapConfig *cfg,
                                          double *out,
                                          size_t capacity);

/**
 * Percentile interval of an arbitrary sample.
 *
 * # Safety
 * `values` must point at `len` doubles; `out` must be writable.
 */
enum CpbStatus cpb_percentile_interval(const double *values,
                                       size_t len,
                                       double alpha_ci,
                                       struct CpbInterval *out);

/**
 * Interval lengths from `cfg->r_outer` bootstrap distributions; `out`
 * needs `cfg->r_outer` slots.
 *
 * # Safety
 * `series` and `cfg` must be valid; `out` must hold `capacity` doubles.
 */
enum CpbStatus cpb_lambda_distribution(const struct CpbSeries *series,
                                       const struct CpbBootstrapConfig *cfg,
                                       double *out,
                                       size_t capacity);

/**
 * Demeaned no-changepoint series.
 *
 * # Safety
 * `series` must be a live handle; `out` must be writable.
 */
enum CpbStatus cpb_demean_null(const struct CpbSeries *series,
                               size_t min_segment,
                               struct CpbSeries **out);

/**
 * Permutation no-changepoint series.
 *
 * # Safety
 * `series` must be a live handle; `out` must be writable.
 */
enum CpbStatus cpb_permute_null(const struct CpbSeries *series,
                                uint64_t seed,
                                struct CpbSeries **out);

/**
 * Run the interval-length test with the seed in `cfg->bootstrap.seed`.
 *
 * # Safety
 * `series` and `cfg` must be valid; `out` must be writable.
 */
enum CpbStatus cpb_ci_length_test(const struct CpbSeries *series,
                                  const struct CpbTestConfig *cfg,
                                  struct CpbTestReport **out);

/**
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum CpbStatus cpb_test_report_summary(const struct CpbTestReport *report,
                                       struct CpbTestSummary *out);

/**
 * Copy the observed-series (λ1) interval lengths.
 *
 * # Safety
 * `report` must be a live handle; `out` must hold `capacity` doubles.
 */
enum CpbStatus cpb_test_report_lambda1(const struct CpbTestReport *report,
                                       double *out,
                                       size_t capacity);

/**
 * Copy the null-series (λ0) interval lengths.
 *
 * # Safety
 * `report` must be a live handle; `out` must hold `capacity` doubles.
 */
enum CpbStatus cpb_test_report_lambda0(const struct CpbTestReport *report,
                                       double *out,
                                       size_t capacity);

/**
 * The report as JSON (17 significant digits); release with [`cpb_string_free`].
 *
 * # Safety
 * `report` must be a live handle; `out` must be writable.
 */
enum CpbStatus cpb_test_report_json(const struct CpbTestReport *report, char **out);

/**
 * # Safety
 * `report` must be NULL or a handle from this library, not yet freed.
 */
void cpb_test_report_free(struct CpbTestReport *report);

/**
 * Power at each effect size (multiples of `sigma`) on synthetic series of
 * length `n` with the changepoint at `n / 2`. `out` needs `grid_len` slots.
 *
 * # Safety
 * `grid` must point at `grid_len` doubles; `cfg` must be valid; `out` must
 * hold `capacity` doubles.
 */
enum CpbStatus cpb_power_curve(const double *grid,
                               size_t grid_len,
                               size_t n,
                               double sigma,
                               size_t repeats,
                               const struct CpbTestConfig *cfg,
                               double *out,
                               size_t capacity);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CPBOOT_H */
