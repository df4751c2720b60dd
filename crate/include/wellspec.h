#ifndef WELLSPEC_H
#define WELLSPEC_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum WsMode {
  WS_MODE_ANM = 0,
  WS_MODE_LSNM = 1,
} WsMode;

typedef enum WsStatus {
  WS_STATUS_OK = 0,
  WS_STATUS_NULL_POINTER = 1,
  WS_STATUS_INVALID_UTF8 = 2,
  /*
   Bad file, column, shape or parameter.
   */
  WS_STATUS_INPUT_ERROR = 3,
  WS_STATUS_INTERNAL = 4,
  WS_STATUS_PANIC = 5,
  /*
   The statistic exists but is undefined for this input.
   */
  WS_STATUS_UNDEFINED = 6,
} WsStatus;

typedef struct WsConfig WsConfig;

typedef struct WsDataset WsDataset;

typedef struct WsReport WsReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/*
 Message for the last failed call on this thread, or null. The pointer
 stays valid until the next call into the library on the same thread.
 */
const char *ws_last_error(void);

/*
 Library version as a static NUL-terminated string.
 */
const char *ws_version(void);

/*
 Load a CSV file with a header row; `target` names the response column.

 # Safety
 `path` and `target` must be NUL-terminated strings; `out` must be writable.
 */
enum WsStatus ws_dataset_load_csv(const char *path, const char *target, struct WsDataset **out);

/*
 Build a dataset from a row-major `n × p` matrix and a response vector.
 Predictors are named `X1..Xp` and the response `Y`.

 # Safety
 `x` must hold `n * p` values, `y` must hold `n`, `out` must be writable.
 */
enum WsStatus ws_dataset_from_arrays(const double *x,
                                     const double *y,
                                     size_t n,
                                     size_t p,
                                     struct WsDataset **out);

/*
 # Safety
 `ds` must be null or a handle from this library not yet freed.
 */
void ws_dataset_free(struct WsDataset *ds);

/*
 # Safety
 `ds` must be a live handle; `n` and `p` must be writable.
 */
enum WsStatus ws_dataset_shape(const struct WsDataset *ds, size_t *n, size_t *p);

/*
 Default settings for the given noise model.

 # Safety
 `out` must be writable.
 */
enum WsStatus ws_config_new(enum WsMode mode, struct WsConfig **out);

/*
 # Safety
 `cfg` must be null or a live handle.
 */
void ws_config_free(struct WsConfig *cfg);

/*
 Number of random splits; each is used in both orientations.

 # Safety
 `cfg` must be a live handle.
 */
enum WsStatus ws_config_set_splits(struct WsConfig *cfg, size_t splits);

/*
 # Safety
 `cfg` must be a live handle.
 */
enum WsStatus ws_config_set_seed(struct WsConfig *cfg, uint64_t seed);

/*
 Global level and per-variable level.

 # Safety
 `cfg` must be a live handle.
 */
enum WsStatus ws_config_set_levels(struct WsConfig *cfg, double alpha, double alpha_tilde);

/*
 Use the gamma approximation instead of permutations for the kernel test.

 # Safety
 `cfg` must be a live handle.
 */
enum WsStatus ws_config_set_gamma_hsic(struct WsConfig *cfg, bool gamma);

/*
 Run the multisplit selection procedure.

 # Safety
 `ds` and `cfg` must be live handles; `out` must be writable.
 */
enum WsStatus ws_analyze(const struct WsDataset *ds,
                         const struct WsConfig *cfg,
                         struct WsReport **out);

/*
 # Safety
 `r` must be null or a live handle.
 */
void ws_report_free(struct WsReport *r);

/*
 Aggregated global p-value.

 # Safety
 `r` must be a live handle and `out` writable.
 */
enum WsStatus ws_report_p0(const struct WsReport *r, double *out);

/*
 Selected predictor positions. Writes up to `cap` indices into `buf` and
 the full count into `len`; pass `cap = 0` to query the size.

 # Safety
 `r` must be a live handle, `buf` must hold `cap` values, `len` writable.
 */
enum WsStatus ws_report_selected(const struct WsReport *r, size_t *buf, size_t cap, size_t *len);

/*
 The report as JSON; release with [`ws_string_free`].

 # Safety
 `r` must be a live handle and `out` writable.
 */
enum WsStatus ws_report_json(const struct WsReport *r, char **out);

/*
 # Safety
 `s` must be null or a string returned by this library.
 */
void ws_string_free(char *s);

/*
 Rank dependence coefficient of `y` on the row-major `n × p` matrix `x`.
 Returns [`WsStatus::Undefined`] when the response is constant.

 # Safety
 `y` must hold `n` values, `x` `n * p`, and `out` must be writable.
 */
enum WsStatus ws_codec(const double *y,
                       const double *x,
                       size_t n,
                       size_t p,
                       uint64_t seed,
                       double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* WELLSPEC_H */
