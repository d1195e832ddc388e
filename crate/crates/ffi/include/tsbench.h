// SPDX-License-Identifier: MIT OR Apache-2.0

#ifndef TSBENCH_H
#define TSBENCH_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum TsbStatus {
  TSB_STATUS_OK = 0,
  TSB_STATUS_NULL_POINTER = 1,
  TSB_STATUS_INVALID_UTF8 = 2,
  TSB_STATUS_INVALID_JSON = 3,
  TSB_STATUS_CONFIG = 4,
  TSB_STATUS_PARAM = 5,
  TSB_STATUS_DOMAIN = 6,
  TSB_STATUS_DATA_MISMATCH = 7,
  TSB_STATUS_IO = 8,
  TSB_STATUS_NOT_FOUND = 9,
  TSB_STATUS_BUFFER_SIZE = 10,
  TSB_STATUS_METRIC_ABSENT = 11,
  TSB_STATUS_PANIC = 12,
} TsbStatus;

/**
 * A generated dataset.
 */
typedef struct TsbDataset TsbDataset;

/**
 * Evaluation results for one or more datasets.
 */
typedef struct TsbReport TsbReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Artifact version string; static, never freed.
 */
const char *tsb_version(void);

/**
 * Copies the last error of this thread into `buf` (NUL terminated, truncated
 * to `len`). Returns the full message length without the NUL, or 0 if the
 * last call succeeded.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t tsb_last_error_message(char *buf, size_t len);

/**
 * Generates a dataset from its JSON spec.
 *
 * # Safety
 * `spec_json` must be a NUL-terminated string; `out` must be writable.
 */
enum TsbStatus tsb_dataset_generate(const char *spec_json, struct TsbDataset **out);

/**
 * # Safety
 * `ds` must be null or a handle from [`tsb_dataset_generate`] not yet freed.
 */
void tsb_dataset_free(struct TsbDataset *ds);

/**
 * # Safety
 * `ds` must be a live dataset handle; `out` must be writable.
 */
enum TsbStatus tsb_dataset_n_steps(const struct TsbDataset *ds, size_t *out);

/**
 * # Safety
 * `ds` must be a live dataset handle; `out` must be writable.
 */
enum TsbStatus tsb_dataset_n_channels(const struct TsbDataset *ds, size_t *out);

/**
 * Copies observed values of `channel` into `buf`, which must hold exactly
 * `n_steps` values.
 *
 * # Safety
 * `ds` must be a live dataset handle; `buf` must point to `len` writable doubles.
 */
enum TsbStatus tsb_dataset_observed(const struct TsbDataset *ds,
                                    size_t channel,
                                    double *buf,
                                    size_t len);

/**
 * Copies the noise- and anomaly-free values of `channel` into `buf`.
 *
 * # Safety
 * As for [`tsb_dataset_observed`].
 */
enum TsbStatus tsb_dataset_clean(const struct TsbDataset *ds,
                                 size_t channel,
                                 double *buf,
                                 size_t len);

/**
 * Scores the oracle and `baselines_json` (a JSON array of baseline specs) on
 * one dataset. Null `protocol_json` uses the default protocol; null
 * `baselines_json` scores the oracle only.
 *
 * # Safety
 * `ds` must be a live dataset handle; string arguments must be null or
 * NUL-terminated; `out` must be writable.
 */
enum TsbStatus tsb_dataset_evaluate(const struct TsbDataset *ds,
                                    const char *protocol_json,
                                    const char *baselines_json,
                                    struct TsbReport **out);

/**
 * Writes every dataset of a TOML suite into `out_dir`.
 *
 * # Safety
 * String arguments must be NUL-terminated.
 */
enum TsbStatus tsb_suite_generate(const char *suite_toml, const char *out_dir);

/**
 * Evaluates a TOML suite and writes the report files into `out_dir`.
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum TsbStatus tsb_suite_evaluate(const char *suite_toml,
                                  const char *out_dir,
                                  struct TsbReport **out);

/**
 * # Safety
 * `report` must be null or a live report handle.
 */
void tsb_report_free(struct TsbReport *report);

/**
 * The report as JSON. The pointer stays valid until the report is freed.
 *
 * # Safety
 * `report` must be a live report handle.
 */
const char *tsb_report_json(const struct TsbReport *report);

/**
 * Looks up one metric. `horizon` 0 selects the mean over horizons; `metric`
 * is one of `mse_obs`, `mse_true`, `mae`, `rmse`, `mape`, `smape`.
 * Returns `MetricAbsent` when the metric is undefined for that row.
 *
 * # Safety
 * `report` must be a live report handle; strings NUL-terminated; `out` writable.
 */
enum TsbStatus tsb_report_metric(const struct TsbReport *report,
                                 const char *dataset,
                                 const char *model,
                                 size_t horizon,
                                 const char *metric,
                                 double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TSBENCH_H */
