#ifndef TRENDCAST_H
#define TRENDCAST_H

/* Generated by cbindgen; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every C-API call.
 */
typedef enum TcStatus {
  /**
   * Success.
   */
  TC_STATUS_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  TC_STATUS_NULL_POINTER = 1,
  /**
   * An argument failed validation (bad week label, bad k, bad UTF-8, ...).
   */
  TC_STATUS_INVALID_ARGUMENT = 2,
  /**
   * File could not be read or parsed.
   */
  TC_STATUS_IO = 3,
  /**
   * The computation itself failed.
   */
  TC_STATUS_COMPUTE = 4,
} TcStatus;

/**
 * Opaque week-aligned panel of term/media/case series.
 */
typedef struct TcPanel TcPanel;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Returns the most recent error message on this thread (empty string if
 * none). Free the result with `tc_string_free`.
 */
char *tc_last_error(void);

/**
 * Frees a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must have been returned by a trendcast function and not freed before.
 */
void tc_string_free(char *s);

/**
 * Loads a panel from weekly CSV files.
 *
 * `media_path` and `cases_path` may be NULL. `week_format` is `"iso"`
 * (default when NULL) or `"sunday"`. On success `*out` owns the panel;
 * release it with `tc_panel_free`.
 *
 * # Safety
 * Path pointers must be NUL-terminated strings or NULL; `out` must be a
 * valid pointer.
 */
enum TcStatus tc_panel_from_csv(const char *terms_path,
                                const char *media_path,
                                const char *cases_path,
                                const char *week_format,
                                struct TcPanel **out);

/**
 * Generates the default synthetic benchmark panel (two case waves, an early
 * media bump, three term groups) for the given seed, week count, and term
 * noise level. Release with `tc_panel_free`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum TcStatus tc_panel_synthetic(uint64_t seed,
                                 uint32_t weeks,
                                 double noise_sd,
                                 struct TcPanel **out);

/**
 * Releases a panel handle. NULL is ignored.
 *
 * # Safety
 * `panel` must have come from a panel-producing function and not be freed
 * twice.
 */
void tc_panel_free(struct TcPanel *panel);

/**
 * Number of term series in the panel.
 *
 * # Safety
 * `panel` and `out` must be valid pointers.
 */
enum TcStatus tc_panel_n_terms(const struct TcPanel *panel, uint32_t *out);

/**
 * Number of weeks covered by the panel.
 *
 * # Safety
 * `panel` and `out` must be valid pointers.
 */
enum TcStatus tc_panel_n_weeks(const struct TcPanel *panel, uint32_t *out);

/**
 * Clusters the panel's terms over `[start_week, end_week]` (NULL means the
 * panel bounds) into `k` clusters. On success `*out_json` holds a JSON
 * object with `dendrogram`, `newick`, `clusters`, and `degenerate_terms`;
 * free it with `tc_string_free`.
 *
 * # Safety
 * `panel` and `out_json` must be valid pointers; week labels must be
 * NUL-terminated strings or NULL.
 */
enum TcStatus tc_cluster_json(const struct TcPanel *panel,
                              const char *start_week,
                              const char *end_week,
                              uint32_t k,
                              char **out_json);

/**
 * Clusters the panel and computes the per-cluster correlation (and, when
 * `with_granger` is true, Granger-precedence) report against whichever of
 * cases/media the panel carries. `*out_json` holds a JSON object with
 * `rows` and `disease_cluster`; free it with `tc_string_free`.
 *
 * # Safety
 * Same contracts as [`tc_cluster_json`].
 */
enum TcStatus tc_driver_report_json(const struct TcPanel *panel,
                                    const char *start_week,
                                    const char *end_week,
                                    uint32_t k,
                                    bool with_granger,
                                    char **out_json);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TRENDCAST_H */
