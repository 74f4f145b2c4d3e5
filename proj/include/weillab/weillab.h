#ifndef WEILLAB_WEILLAB_H
#define WEILLAB_WEILLAB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(WL_BUILDING_LIBRARY)
#define WL_API __attribute__((visibility("default")))
#else
#define WL_API
#endif

typedef enum wl_status {
  WL_OK = 0,
  WL_ERR_INVALID_ARGUMENT = 1,
  WL_ERR_DEGENERATE_INPUT = 2,
  WL_ERR_RESOURCE_LIMIT = 3,
  WL_ERR_UNSUPPORTED = 4,
  WL_ERR_NEEDS_MORE_SLACK = 5,
  WL_ERR_ILL_CONDITIONED = 6,
  WL_ERR_IO = 7,
  WL_ERR_INTERNAL = 8,
  WL_ERR_UNKNOWN_EXPERIMENT = 9
} wl_status;

typedef enum wl_verdict {
  WL_VERDICT_PASS = 0,
  WL_VERDICT_FAIL = 1,
  WL_VERDICT_INFO = 2,
  WL_VERDICT_RESOURCE_LIMITED = 3
} wl_verdict;

typedef struct wl_context wl_context;
typedef struct wl_report wl_report;

WL_API const char* wl_version(void);
/* Message of the last failed call on this thread; empty after success. */
WL_API const char* wl_last_error(void);

WL_API size_t wl_experiment_count(void);
WL_API const char* wl_experiment_name(size_t i);

/* ---- contexts hold one experiment configuration */
WL_API wl_status wl_context_create(wl_context** out);
WL_API void wl_context_destroy(wl_context* ctx);
/* key "experiment", "out", "format" or an experiment parameter (g, p, l, k, l0, N, seed, budget, ...) */
WL_API wl_status wl_context_set(wl_context* ctx, const char* key, const char* value);
/* key=value file; values already set on the context take precedence */
WL_API wl_status wl_context_load_config(wl_context* ctx, const char* path);
WL_API wl_status wl_context_validate(const wl_context* ctx);

/* ---- reports */
WL_API wl_status wl_run_experiment(const wl_context* ctx, wl_report** out);
WL_API void wl_report_destroy(wl_report* r);
WL_API size_t wl_report_verdict_count(const wl_report* r);
WL_API wl_status wl_report_verdict(const wl_report* r, size_t i, wl_verdict* status, const char** name,
                                   const char** observed, const char** tolerance);
WL_API wl_verdict wl_report_aggregate(const wl_report* r);
/* 0 all pass, 2 any failure, 3 resource-limited */
WL_API int wl_report_exit_code(const wl_report* r);
WL_API size_t wl_report_row_count(const wl_report* r);
WL_API double wl_report_wall_seconds(const wl_report* r);
/* Strings stay valid until the report is destroyed. */
WL_API const char* wl_report_json(wl_report* r);
WL_API const char* wl_report_csv(wl_report* r);
WL_API const char* wl_report_summary(wl_report* r);
/* format: "csv", "json" or "both"; writes <base>.csv and/or <base>.json */
WL_API wl_status wl_report_write(const wl_report* r, const char* format, const char* base);

/* ---- direct queries; rationals are written as "num/den" into buf */
WL_API wl_status wl_set_cache_dir(const char* dir);
WL_API wl_status wl_v_l_trace(int g, int64_t p, int64_t l, int k, int64_t t, char* buf, size_t cap);
/* a holds a_1..a_g of the Weil polynomial */
WL_API wl_status wl_v_l_charpoly(int g, int64_t p, const int64_t* a, int64_t l, int k, char* buf, size_t cap);
WL_API wl_status wl_zeta_ratio(int g, int64_t p, const int64_t* a, int64_t l, char* buf, size_t cap);
WL_API wl_status wl_v_inf(int g, int64_t p, const int64_t* a, double* out);
WL_API wl_status wl_st_density(int g, double x, double* out);
WL_API wl_status wl_group_order(int g, int64_t l, int k, char* buf, size_t cap);

#ifdef __cplusplus
}
#endif

#endif
