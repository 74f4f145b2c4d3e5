// One PASS/FAIL line per acceptance criterion, driven through the C API.
#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "weillab/weillab.h"

namespace {

struct Criterion {
  int id;
  const char* experiment;
  const char* what;
};

const std::vector<Criterion> kCriteria = {
    {1, "remark-counterexample", "projection ratio 7/6 and direct ratio 3/2 for x^2+5x+4 at l=3"},
    {2, "good-prime-identity", "v_l,1 equals the zeta ratio at good primes"},
    {3, "trace-envelope", "genus-2 trace factors within c/l^2, c <= 10"},
    {4, "stabilization", "x^2+5x+4 at l=3 stabilizes by k=5, v_1 = 9/8 != 3/2"},
    {5, "gekeler-g1", "elliptic masses match ST_1 times local factors"},
    {6, "l1-trend-g2", "genus-2 masses near p^3 and L1 distance decreasing"},
    {7, "sato-tate-selfcheck", "Sato-Tate normalizations and v_inf route agreement"},
    {8, "region-volume", "region volume bracket, spec counts and p^(3/2) growth"},
    {9, "a-sigma", "a_sigma averages to 0 and matches splitting data"},
    {10, "vp-identity", "M-scheme ratio at l=p equals the zeta ratio"},
    {11, "averaging", "box averages exact on full periods with O(1/N) error"},
};

}  // namespace

int main() {
  int failed = 0;
  for (const auto& c : kCriteria) {
    auto t0 = std::chrono::steady_clock::now();
    wl_context* ctx = nullptr;
    wl_report* rep = nullptr;
    bool ok = wl_context_create(&ctx) == WL_OK && wl_context_set(ctx, "experiment", c.experiment) == WL_OK &&
              wl_run_experiment(ctx, &rep) == WL_OK;
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string detail;
    if (!ok) {
      detail = std::string("error: ") + wl_last_error();
    } else {
      ok = wl_report_aggregate(rep) == WL_VERDICT_PASS;
      for (size_t i = 0; i < wl_report_verdict_count(rep); ++i) {
        wl_verdict v;
        const char *name, *obs, *tol;
        wl_report_verdict(rep, i, &v, &name, &obs, &tol);
        if (v == WL_VERDICT_FAIL || v == WL_VERDICT_RESOURCE_LIMITED)
          detail += std::string(detail.empty() ? "" : "; ") + name + ": " + obs + " (tolerance " + tol + ")";
      }
    }
    std::printf("%s criterion %d [%s]: %s (%.1fs)%s%s\n", ok ? "PASS" : "FAIL", c.id, c.experiment, c.what, secs,
                detail.empty() ? "" : " -- ", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failed;
    wl_report_destroy(rep);
    wl_context_destroy(ctx);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(kCriteria.size()) - failed, kCriteria.size());
  return failed == 0 ? 0 : 1;
}
