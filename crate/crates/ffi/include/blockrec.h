#ifndef BLOCKREC_H
#define BLOCKREC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

// Observed symbol codes.
#define BR_SYMBOL_ZERO 0

#define BR_SYMBOL_ONE 1

#define BR_SYMBOL_ERASED 2

// Status code returned by every function.
typedef enum BrStatus {
  BR_STATUS_OK = 0,
  BR_STATUS_NULL_POINTER = 1,
  BR_STATUS_INVALID_PARAMETER = 2,
  BR_STATUS_SIZE_CAP_EXCEEDED = 3,
  BR_STATUS_IO = 4,
  BR_STATUS_FORMAT = 5,
  BR_STATUS_PANIC = 6,
} BrStatus;

// Tie handling for majority decoding.
typedef enum BrTiePolicy {
  BR_TIE_POLICY_FAIR_COIN = 0,
  BR_TIE_POLICY_COUNT_AS_ERROR = 1,
} BrTiePolicy;

// Block-constant matrix handle.
typedef struct BrBlockMatrix BrBlockMatrix;

// Observed matrix handle.
typedef struct BrObserved BrObserved;

// Partition handle.
typedef struct BrPartition BrPartition;

// Message for the last failed call on this thread, or null. Valid until the
// next failing call on the same thread.
const char *br_last_error_message(void);

// Samples a block-constant matrix from the uniform law.
//
// # Safety
// `out` must be valid for writes.
enum BrStatus br_generate(size_t m,
                          size_t n,
                          size_t m0,
                          size_t n0,
                          bool permute,
                          uint64_t seed,
                          struct BrBlockMatrix **out);

// Builds a block-constant matrix from partitions and a row-major `r x t`
// table of 0/1 block values.
//
// # Safety
// `rows` and `cols` must be live handles, `values` must point to
// `values_len` bytes, `out` must be valid for writes.
enum BrStatus br_block_matrix_new(const struct BrPartition *rows,
                                  const struct BrPartition *cols,
                                  const uint8_t *values,
                                  size_t values_len,
                                  struct BrBlockMatrix **out);

// # Safety
// `x` must be null or a handle not yet freed.
void br_block_matrix_free(struct BrBlockMatrix *x);

// # Safety
// `x` must be a live handle; `m` and `n` must be valid for writes.
enum BrStatus br_block_matrix_dims(const struct BrBlockMatrix *x, size_t *m, size_t *n);

// # Safety
// `x` must be a live handle; `out` must be valid for writes.
enum BrStatus br_block_matrix_entry(const struct BrBlockMatrix *x,
                                    size_t i,
                                    size_t k,
                                    uint8_t *out);

// Writes the matrix in the text format (no erasures).
//
// # Safety
// `x` must be a live handle; `path` a NUL-terminated string.
enum BrStatus br_block_matrix_write(const struct BrBlockMatrix *x, const char *path_);

// Sets `out` to whether both matrices have the same entries.
//
// # Safety
// `a` and `b` must be live handles; `out` must be valid for writes.
enum BrStatus br_block_matrix_same_entries(const struct BrBlockMatrix *a,
                                           const struct BrBlockMatrix *b,
                                           bool *out);

// Copies the row (`axis` 0) or column (`axis` 1) partition of `x`.
//
// # Safety
// `x` must be a live handle; `out` must be valid for writes.
enum BrStatus br_block_matrix_partition(const struct BrBlockMatrix *x,
                                        uint32_t axis,
                                        struct BrPartition **out);

// Canonicalizes `labels` into a partition.
//
// # Safety
// `labels` must point to `len` values; `out` must be valid for writes.
enum BrStatus br_partition_from_labels(const size_t *labels, size_t len, struct BrPartition **out);

// # Safety
// `p` must be null or a handle not yet freed.
void br_partition_free(struct BrPartition *p);

// # Safety
// `p` must be a live handle; `len` and `clusters` must be valid for writes.
enum BrStatus br_partition_info(const struct BrPartition *p, size_t *len, size_t *clusters);

// Copies the canonical labels into `buf`, which must hold `buf_len >= len`
// values.
//
// # Safety
// `p` must be a live handle; `buf` must be valid for `buf_len` writes.
enum BrStatus br_partition_labels(const struct BrPartition *p, size_t *buf, size_t buf_len);

// Reads a label file.
//
// # Safety
// `path` must be a NUL-terminated string; `out` must be valid for writes.
enum BrStatus br_partition_read(const char *path_, struct BrPartition **out);

// # Safety
// `p` must be a live handle; `path` a NUL-terminated string.
enum BrStatus br_partition_write(const struct BrPartition *p, const char *path_);

// Passes `x` through the erasure + BSC channel.
//
// # Safety
// `x` must be a live handle; `out` must be valid for writes.
enum BrStatus br_transmit(const struct BrBlockMatrix *x,
                          double eps,
                          double p,
                          uint64_t seed,
                          struct BrObserved **out);

// # Safety
// `y` must be null or a handle not yet freed.
void br_observed_free(struct BrObserved *y);

// # Safety
// `path` must be a NUL-terminated string; `out` must be valid for writes.
enum BrStatus br_observed_read(const char *path_, struct BrObserved **out);

// # Safety
// `y` must be a live handle; `path` a NUL-terminated string.
enum BrStatus br_observed_write(const struct BrObserved *y, const char *path_);

// # Safety
// `y` must be a live handle; `m` and `n` must be valid for writes.
enum BrStatus br_observed_dims(const struct BrObserved *y, size_t *m, size_t *n);

// Entry `(i, k)` as one of the `BR_SYMBOL_*` codes.
//
// # Safety
// `y` must be a live handle; `out` must be valid for writes.
enum BrStatus br_observed_get(const struct BrObserved *y, size_t i, size_t k, uint8_t *out);

// Clusters rows and columns of `y` with the channel's threshold.
//
// # Safety
// `y` must be a live handle; `rows` and `cols` must be valid for writes.
enum BrStatus br_cluster(const struct BrObserved *y,
                         double eps,
                         double p,
                         struct BrPartition **rows,
                         struct BrPartition **cols);

// Majority-decodes `y` with the given partitions. `tie_occurred` may be null.
//
// # Safety
// Handles must be live; `out` must be valid for writes.
enum BrStatus br_decode(const struct BrObserved *y,
                        const struct BrPartition *rows,
                        const struct BrPartition *cols,
                        enum BrTiePolicy tie,
                        uint64_t seed,
                        struct BrBlockMatrix **out,
                        bool *tie_occurred);

// Exact block error probability of majority decoding with known clusters.
//
// # Safety
// `sizes` must point to `len` values; `out` must be valid for writes.
enum BrStatus br_exact_pe(const size_t *sizes,
                          size_t len,
                          double eps,
                          double p,
                          enum BrTiePolicy tie,
                          double *out);

// # Safety
// `out` must be valid for writes.
enum BrStatus br_p1(double eps, double p, double *out);

// `1 - prod(1 - u^s)` over the cluster sizes.
//
// # Safety
// `sizes` must point to `len` values; `out` must be valid for writes.
enum BrStatus br_g(double u, const size_t *sizes, size_t len, double *out);

// Lower and upper bounds on the known-cluster error probability.
//
// # Safety
// `sizes` must point to `len` values; `lower` and `upper` must be valid for
// writes.
enum BrStatus br_error_bounds(const size_t *sizes,
                              size_t len,
                              double eps,
                              double p,
                              double *lower,
                              double *upper);

// Cluster-size thresholds of the phase transition. Undefined thresholds are
// reported as NaN.
//
// # Safety
// `decodable_min` and `undecodable_max` must be valid for writes.
enum BrStatus br_thresholds(size_t m,
                            size_t n,
                            double eps,
                            double p,
                            double delta,
                            double *decodable_min,
                            double *undecodable_max);

// Same-cluster mean distance, separation coefficient and threshold.
//
// # Safety
// `mu`, `delta` and `d0` must be valid for writes.
enum BrStatus br_clustering_stats(double eps, double p, double *mu, double *delta, double *d0);

// Wilson score interval.
//
// # Safety
// `low` and `high` must be valid for writes.
enum BrStatus br_wilson_interval(uint64_t successes,
                                 uint64_t trials,
                                 double z,
                                 double *low,
                                 double *high);

#endif  /* BLOCKREC_H */
