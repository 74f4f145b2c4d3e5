#include "weillab/weillab.h"

#include <cstring>
#include <new>
#include <string>

#include "experiments.hpp"
#include "local_factors.hpp"
#include "count_cache.hpp"
#include "sato_tate.hpp"

struct wl_context {
  wl::ExperimentConfig cfg;
};

struct wl_report {
  wl::ExperimentReport rep;
  std::string json, csv, summary;
  std::vector<std::string> verdict_status;
};

namespace {

thread_local std::string g_last_error;

wl_status code_of(wl::Errc c) { return static_cast<wl_status>(static_cast<int>(c)); }

template <class F>
wl_status guard(F&& f) {
  try {
    f();
    g_last_error.clear();
    return WL_OK;
  } catch (const wl::Error& e) {
    g_last_error = e.what();
    return code_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return WL_ERR_RESOURCE_LIMIT;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return WL_ERR_INTERNAL;
  }
}

void need(const void* p, const char* what) {
  if (!p) wl::fail(wl::Errc::invalid_argument, std::string(what) + " is null");
}

void put(const std::string& s, char* buf, size_t cap) {
  need(buf, "buffer");
  if (s.size() + 1 > cap) wl::fail(wl::Errc::invalid_argument, "buffer too small, need " + std::to_string(s.size() + 1));
  std::memcpy(buf, s.c_str(), s.size() + 1);
}

wl::WeilSpec make_spec(int g, int64_t p, const int64_t* a) {
  need(a, "coefficient array");
  wl::WeilSpec s{g, p, std::vector<int64_t>(a, a + std::max(g, 0))};
  wl::validate(s);
  return s;
}

wl_verdict to_c(wl::Verdict v) {
  switch (v) {
    case wl::Verdict::pass: return WL_VERDICT_PASS;
    case wl::Verdict::fail: return WL_VERDICT_FAIL;
    case wl::Verdict::info: return WL_VERDICT_INFO;
    case wl::Verdict::resource_limited: return WL_VERDICT_RESOURCE_LIMITED;
  }
  return WL_VERDICT_FAIL;
}

}  // namespace

extern "C" {

const char* wl_version(void) { return wl::kVersion; }
const char* wl_last_error(void) { return g_last_error.c_str(); }

size_t wl_experiment_count(void) { return wl::experiment_names().size(); }

const char* wl_experiment_name(size_t i) {
  static const std::vector<std::string> names = wl::experiment_names();
  return i < names.size() ? names[i].c_str() : nullptr;
}

wl_status wl_context_create(wl_context** out) {
  return guard([&] {
    need(out, "out");
    *out = new wl_context;
  });
}

void wl_context_destroy(wl_context* ctx) { delete ctx; }

wl_status wl_context_set(wl_context* ctx, const char* key, const char* value) {
  return guard([&] {
    need(ctx, "context");
    need(key, "key");
    need(value, "value");
    std::string k = key;
    if (k == "experiment") ctx->cfg.name = value;
    else if (k == "out") ctx->cfg.out = value;
    else if (k == "format") ctx->cfg.format = value;
    else if (k.empty()) wl::fail(wl::Errc::invalid_argument, "empty key");
    else ctx->cfg.params[k] = value;
  });
}

wl_status wl_context_load_config(wl_context* ctx, const char* path) {
  return guard([&] {
    need(ctx, "context");
    need(path, "path");
    wl::ExperimentConfig file = wl::load_config_file(path);
    // values already set on the context win over the file
    ctx->cfg = wl::merge_config(file, ctx->cfg);
  });
}

wl_status wl_context_validate(const wl_context* ctx) {
  return guard([&] {
    need(ctx, "context");
    wl::validate_config(ctx->cfg);
  });
}

wl_status wl_run_experiment(const wl_context* ctx, wl_report** out) {
  return guard([&] {
    need(ctx, "context");
    need(out, "out");
    *out = nullptr;
    auto* r = new wl_report;
    try {
      r->rep = wl::run_experiment(ctx->cfg);
    } catch (...) {
      delete r;
      throw;
    }
    *out = r;
  });
}

void wl_report_destroy(wl_report* r) { delete r; }

size_t wl_report_verdict_count(const wl_report* r) { return r ? r->rep.verdicts.size() : 0; }

wl_status wl_report_verdict(const wl_report* r, size_t i, wl_verdict* status, const char** name,
                            const char** observed, const char** tolerance) {
  return guard([&] {
    need(r, "report");
    if (i >= r->rep.verdicts.size()) wl::fail(wl::Errc::invalid_argument, "verdict index out of range");
    const auto& v = r->rep.verdicts[i];
    if (status) *status = to_c(v.status);
    if (name) *name = v.name.c_str();
    if (observed) *observed = v.observed.c_str();
    if (tolerance) *tolerance = v.tolerance.c_str();
  });
}

wl_verdict wl_report_aggregate(const wl_report* r) { return r ? to_c(r->rep.aggregate()) : WL_VERDICT_FAIL; }
int wl_report_exit_code(const wl_report* r) { return r ? wl::exit_code(r->rep) : 2; }
size_t wl_report_row_count(const wl_report* r) { return r ? r->rep.rows.size() : 0; }
double wl_report_wall_seconds(const wl_report* r) { return r ? r->rep.wall_seconds : 0; }

const char* wl_report_json(wl_report* r) {
  if (!r) return nullptr;
  if (r->json.empty()) r->json = wl::to_json(r->rep);
  return r->json.c_str();
}

const char* wl_report_csv(wl_report* r) {
  if (!r) return nullptr;
  if (r->csv.empty()) r->csv = wl::to_csv(r->rep);
  return r->csv.c_str();
}

const char* wl_report_summary(wl_report* r) {
  if (!r) return nullptr;
  if (r->summary.empty()) r->summary = wl::verdict_lines(r->rep);
  return r->summary.c_str();
}

wl_status wl_report_write(const wl_report* r, const char* format, const char* base) {
  return guard([&] {
    need(r, "report");
    need(format, "format");
    need(base, "base path");
    wl::emit(r->rep, format, base);
  });
}

wl_status wl_set_cache_dir(const char* dir) {
  return guard([&] { wl::set_cache_dir(dir ? dir : ""); });
}

wl_status wl_v_l_trace(int g, int64_t p, int64_t l, int k, int64_t t, char* buf, size_t cap) {
  return guard([&] {
    if (g < 1 || g > 2) wl::fail(wl::Errc::unsupported, "wl_v_l_trace: g must be 1 or 2");
    put(wl::to_string(wl::v_l_trace(g, p, l, k, t)), buf, cap);
  });
}

wl_status wl_v_l_charpoly(int g, int64_t p, const int64_t* a, int64_t l, int k, char* buf, size_t cap) {
  return guard([&] { put(wl::to_string(wl::v_l_charpoly(make_spec(g, p, a), l, k)), buf, cap); });
}

wl_status wl_zeta_ratio(int g, int64_t p, const int64_t* a, int64_t l, char* buf, size_t cap) {
  return guard([&] { put(wl::to_string(wl::zeta_ratio(make_spec(g, p, a), l)), buf, cap); });
}

wl_status wl_v_inf(int g, int64_t p, const int64_t* a, double* out) {
  return guard([&] {
    need(out, "out");
    *out = wl::v_inf(make_spec(g, p, a));
  });
}

wl_status wl_st_density(int g, double x, double* out) {
  return guard([&] {
    need(out, "out");
    *out = wl::st_density(g, x);
  });
}

wl_status wl_group_order(int g, int64_t l, int k, char* buf, size_t cap) {
  return guard([&] { put(wl::group_order(g, l, k).str(), buf, cap); });
}

}  // extern "C"
