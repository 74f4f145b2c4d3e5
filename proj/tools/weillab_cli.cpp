#include <cstdio>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "weillab/weillab.h"

namespace {

int report_error(const char* what) {
  std::fprintf(stderr, "weillab: %s: %s\n", what, wl_last_error());
  return 1;
}

struct RunOptions {
  std::map<std::string, std::string> flags;  // flag name -> value, only when given
  std::vector<std::string> sets;
  std::string config, format, out, cache_dir;
  bool print = false;
};

int run(const std::string& name, const RunOptions& o) {
  wl_context* ctx = nullptr;
  if (wl_context_create(&ctx) != WL_OK) return report_error("context");
  auto set = [&](const std::string& k, const std::string& v) { return wl_context_set(ctx, k.c_str(), v.c_str()) == WL_OK; };
  bool ok = set("experiment", name);
  for (const auto& [k, v] : o.flags) ok = ok && set(k, v);
  for (const auto& kv : o.sets) {
    auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "weillab: --set expects key=value, got '%s'\n", kv.c_str());
      wl_context_destroy(ctx);
      return 1;
    }
    ok = ok && set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!o.format.empty()) ok = ok && set("format", o.format);
  if (!o.out.empty()) ok = ok && set("out", o.out);
  if (ok && !o.config.empty()) ok = wl_context_load_config(ctx, o.config.c_str()) == WL_OK;
  if (ok && !o.cache_dir.empty()) ok = wl_set_cache_dir(o.cache_dir.c_str()) == WL_OK;
  if (ok) ok = wl_context_validate(ctx) == WL_OK;
  if (!ok) {
    int rc = report_error("configuration");
    wl_context_destroy(ctx);
    return rc;
  }
  wl_report* rep = nullptr;
  wl_status st = wl_run_experiment(ctx, &rep);
  wl_context_destroy(ctx);
  if (st != WL_OK) return report_error(name.c_str());

  std::string format = o.format.empty() ? "json" : o.format;
  if (o.print) std::fputs(format == "csv" ? wl_report_csv(rep) : wl_report_json(rep), stdout);
  if (!o.out.empty() && wl_report_write(rep, format.c_str(), o.out.c_str()) != WL_OK) {
    wl_report_destroy(rep);
    return report_error("write");
  }
  std::fputs(wl_report_summary(rep), o.print ? stderr : stdout);
  std::fprintf(stderr, "%s: %zu rows, %.2f s\n", name.c_str(), wl_report_row_count(rep), wl_report_wall_seconds(rep));
  int rc = wl_report_exit_code(rep);
  wl_report_destroy(rep);
  return rc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Local factors and Sato-Tate experiments for ordinary Weil polynomials"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(wl_version()));

  RunOptions opts;
  std::string chosen;
  static const char* flag_names[] = {"g", "p", "l", "k", "l0", "N", "seed", "budget"};
  std::map<std::string, std::string> flag_values;

  for (size_t i = 0; i < wl_experiment_count(); ++i) {
    std::string name = wl_experiment_name(i);
    auto* sub = app.add_subcommand(name, "run the " + name + " experiment");
    for (const char* f : flag_names)
      sub->add_option(std::string("--") + f, flag_values[f], std::string("parameter ") + f + " (comma lists allowed)");
    sub->add_option("--set", opts.sets, "extra parameter key=value");
    sub->add_option("--config", opts.config, "key=value config file; flags override it");
    sub->add_option("--format", opts.format, "csv, json or both")->check(CLI::IsMember({"csv", "json", "both"}));
    sub->add_option("--out", opts.out, "base path for output files");
    sub->add_option("--cache-dir", opts.cache_dir, "directory for the count cache");
    sub->add_flag("--print", opts.print, "print the report body to stdout");
    sub->callback([&chosen, name] { chosen = name; });
  }

  auto* list = app.add_subcommand("list", "list experiments");
  list->callback([] {
    for (size_t i = 0; i < wl_experiment_count(); ++i) std::puts(wl_experiment_name(i));
  });

  int g = 1, k = 1;
  long long p = 0, l = 0, t = 0;
  auto* vl = app.add_subcommand("vl", "trace local factor v_{l,k}(t) as an exact rational");
  vl->add_option("--g", g)->required();
  vl->add_option("--p", p)->required();
  vl->add_option("--l", l)->required();
  vl->add_option("--k", k)->required();
  vl->add_option("--t", t)->required();
  int rc = 0;
  vl->callback([&] {
    char buf[4096];
    if (wl_v_l_trace(g, p, l, k, t, buf, sizeof buf) != WL_OK) rc = report_error("vl");
    else std::puts(buf);
  });

  double x = 0;
  auto* st = app.add_subcommand("st", "Sato-Tate trace density");
  st->add_option("--g", g)->required();
  st->add_option("--x", x)->required();
  st->callback([&] {
    double v = 0;
    if (wl_st_density(g, x, &v) != WL_OK) rc = report_error("st");
    else std::printf("%.12g\n", v);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }
  if (chosen.empty()) return rc;
  for (const auto& [name, v] : flag_values) {
    if (!app.get_subcommand(chosen)->get_option("--" + name)->empty()) opts.flags[name] = v;
  }
  return run(chosen, opts);
}
