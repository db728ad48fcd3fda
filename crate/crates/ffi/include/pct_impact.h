#ifndef PCT_IMPACT_H
#define PCT_IMPACT_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Result code of every fallible call.
typedef enum PctStatus {
  PCT_STATUS_OK = 0,
  PCT_STATUS_NULL_POINTER = 1,
  PCT_STATUS_INVALID_STRING = 2,
  PCT_STATUS_INVALID_PARAMETER = 3,
  PCT_STATUS_PRECONDITION = 4,
  PCT_STATUS_DEGENERATE_VARIANCE = 5,
  PCT_STATUS_DEGENERATE_REFERENCE = 6,
  PCT_STATUS_EMPTY_DATASET = 7,
  PCT_STATUS_UNKNOWN_INSTITUTION = 8,
  PCT_STATUS_CONFIG = 9,
  PCT_STATUS_TOO_MANY_REJECTS = 10,
  PCT_STATUS_CAPABILITY = 11,
  PCT_STATUS_IO = 12,
  PCT_STATUS_PARSE = 13,
  PCT_STATUS_BUFFER_TOO_SMALL = 14,
  PCT_STATUS_PANIC = 15,
} PctStatus;

typedef enum PctScheme {
  // 100·i/n, descending, zero-cited papers pinned to 100.
  PCT_SCHEME_INCITES = 0,
  // 100·(i−1)/n, ascending.
  PCT_SCHEME_COMMON = 1,
} PctScheme;

typedef enum PctCounting {
  PCT_COUNTING_BINARY = 0,
  PCT_COUNTING_FRACTIONAL = 1,
} PctCounting;

// Opaque parsed dataset.
typedef struct PctDataset PctDataset;

// Mean test result. `pooled_sd` is NaN for one-sample tests.
typedef struct PctMeanTest {
  double estimate;
  double se;
  double t;
  double df;
  double p;
  double ci_low;
  double ci_high;
  double d;
  double pooled_sd;
} PctMeanTest;

typedef struct PctTopShare {
  uint64_t n;
  double share;
  // Number of top papers; fractional under fractional counting.
  double count;
} PctTopShare;

// Proportion test result; all values are proportions, not percentages.
typedef struct PctProportionTest {
  double estimate;
  double se;
  double z;
  double p;
  double ci_low;
  double ci_high;
  double h;
} PctProportionTest;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null after a
// success. Valid until the next call into this library on the same thread.
const char *pct_last_error_message(void);

// Static, NUL-terminated library version.
const char *pct_version(void);

// Parses a CSV file. Rows with bad values are skipped and counted.
//
// # Safety
// `path` is a NUL-terminated string; `out` is valid for one pointer write.
enum PctStatus pct_dataset_from_path(const char *path, struct PctDataset **out);

// Parses CSV text held in memory.
//
// # Safety
// `csv` is a NUL-terminated string; `out` is valid for one pointer write.
enum PctStatus pct_dataset_from_csv(const char *csv, struct PctDataset **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `dataset` is null or a handle not yet freed.
void pct_dataset_free(struct PctDataset *dataset);

// Number of papers.
//
// # Safety
// `dataset` is a live handle; `out` is valid for writes.
enum PctStatus pct_dataset_len(const struct PctDataset *dataset, size_t *out);

// Number of rejected input rows.
//
// # Safety
// `dataset` is a live handle; `out` is valid for writes.
enum PctStatus pct_dataset_reject_count(const struct PctDataset *dataset, size_t *out);

// Number of distinct institutions.
//
// # Safety
// `dataset` is a live handle; `out` is valid for writes.
enum PctStatus pct_dataset_institution_count(const struct PctDataset *dataset, size_t *out);

// Copies the label of institution `index` (sorted order) into `buf` with a
// terminating NUL. `required` receives the needed size including the NUL;
// `BufferTooSmall` is returned when `buf_len` is short.
//
// # Safety
// `dataset` is a live handle; `buf` is valid for `buf_len` bytes or null
// when `buf_len` is 0; `required` is null or valid for writes.
enum PctStatus pct_dataset_institution_label(const struct PctDataset *dataset,
                                             size_t index,
                                             char *buf,
                                             size_t buf_len,
                                             size_t *required);

// One-sample t test of an institution's mean percentile against `mu0`.
// Percentiles are taken from the file when every row supplies one and
// are computed under `scheme` otherwise.
//
// # Safety
// `dataset` is a live handle; `institution` is a NUL-terminated string;
// `out` is valid for writes.
enum PctStatus pct_institution_mean_test(const struct PctDataset *dataset,
                                         const char *institution,
                                         enum PctScheme scheme,
                                         double mu0,
                                         double ci_level,
                                         struct PctMeanTest *out);

// PP_top x% of an institution.
//
// # Safety
// `dataset` is a live handle; `institution` is a NUL-terminated string;
// `out` is valid for writes.
enum PctStatus pct_institution_top_share(const struct PctDataset *dataset,
                                         const char *institution,
                                         enum PctScheme scheme,
                                         double top_x,
                                         enum PctCounting counting,
                                         struct PctTopShare *out);

// One-sample t test from published moments.
//
// # Safety
// `out` is valid for writes.
enum PctStatus pct_one_sample_t(size_t n,
                                double mean,
                                double sd,
                                double mu0,
                                double ci_level,
                                struct PctMeanTest *out);

// Two-sample t test of `mean1 - mean2`; pooled variance unless `welch`.
//
// # Safety
// `out` is valid for writes.
enum PctStatus pct_two_sample_t(size_t n1,
                                double mean1,
                                double sd1,
                                size_t n2,
                                double mean2,
                                double sd2,
                                bool welch,
                                double ci_level,
                                struct PctMeanTest *out);

// One-sample z test of `count / n` against `p0`.
//
// # Safety
// `out` is valid for writes.
enum PctStatus pct_one_sample_prop_z(uint64_t count,
                                     uint64_t n,
                                     double p0,
                                     double ci_level,
                                     struct PctProportionTest *out);

// Two-sample z test of `count1/n1 - count2/n2`.
//
// # Safety
// `out` is valid for writes.
enum PctStatus pct_two_sample_prop_z(uint64_t count1,
                                     uint64_t n1,
                                     uint64_t count2,
                                     uint64_t n2,
                                     double ci_level,
                                     struct PctProportionTest *out);

// Percentile of each paper in one reference set, written to `out[0..n]`.
//
// # Safety
// `citations` and `out` are valid for `n` elements.
enum PctStatus pct_percentile_ranks(const uint64_t *citations,
                                    size_t n,
                                    enum PctScheme scheme,
                                    double *out);

// Fractional top-x% weights of one reference set, written to
// `weights[0..n]`; `share` receives their mean.
//
// # Safety
// `citations` and `weights` are valid for `n` elements; `share` is valid
// for writes.
enum PctStatus pct_fractional_weights(const uint64_t *citations,
                                      size_t n,
                                      double top_x,
                                      double *weights,
                                      double *share);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PCT_IMPACT_H */
