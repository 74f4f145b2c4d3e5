#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "symplectic.hpp"
#include "weil_poly.hpp"

namespace wl {

enum class FactorKind { trace, charpoly, archimedean, zeta_ratio, p_adic };
const char* to_string(FactorKind k);

struct LocalFactor {
  FactorKind kind = FactorKind::trace;
  int64_t l = 0;
  int k = 0;
  Rational value = 0;
  double real = 0;
  std::string formula;
  bool stabilized = true;
};

struct EulerProduct {
  double base = 1;
  std::vector<LocalFactor> factors;  // ascending l
  int64_t l0 = 0;
  double product = 1;
  double envelope_c = 0;   // fitted constant of the per-prime envelope
  int envelope_power = 2;  // |v_l - 1| <= c / l^power
  double tail_rel = 0;     // relative half-width of the tail interval
  std::string tail_rule;
  bool heuristic = false;
};

struct SplittingProfile {
  int64_t l = 0;
  std::vector<int> f_degrees, plus_degrees;
  std::map<int, int> e_K, e_Kplus;  // number of primes of norm l^d
  int a_K() const;                  // e_1(K) - e_1(K+)
};

// ---- archimedean
struct VInfRoutes {
  Rational D_disc;  // exact, from discriminants
  double D_angles = 0;
  double value = 0;
};
VInfRoutes v_inf_routes(const WeilSpec& s);
double v_inf(const WeilSpec& s);

// ---- normalizations
Rational trace_denominator(int g, int64_t l, int k);
Rational charpoly_denominator(int g, int64_t l, int k);

// ---- trace factors
// Full table of v_{l,k}(t) for t mod l^k (all ones when l = p).
const std::vector<Rational>& trace_factor_table(int g, int64_t p, int64_t l, int k,
                                                uint64_t budget = kDefaultBudget);
Rational v_l_trace(int g, int64_t p, int64_t l, int k, int64_t t, uint64_t budget = kDefaultBudget);
// k = 1 values from the class-size formula (odd l != p).
const std::vector<Rational>& trace_factor_table_class(int g, int64_t p, int64_t l);

// ---- charpoly factors
Rational v_l_charpoly(const WeilSpec& s, int64_t l, int k, uint64_t budget = kDefaultBudget);
struct StableFactor {
  Rational value;
  int k = 1;           // level used
  int k_star = 1;      // first level from which values agree up to k
  bool stabilized = false;
  std::vector<Rational> history;
};
StableFactor v_l_charpoly_stable(const WeilSpec& s, int64_t l, int k_max, uint64_t budget = kDefaultBudget);

SplittingProfile splitting_profile(const WeilSpec& s, int64_t l);
Rational zeta_ratio(const WeilSpec& s, int64_t l);

// Signed cycle type of Frobenius at l on the roots: (length, +1/-1), sorted.
using SignedCycleType = std::vector<std::pair<int, int>>;
SignedCycleType frobenius_cycle_type(const WeilSpec& s, int64_t l);

struct VpResult {
  Rational zeta;
  bool hypothesis = false;  // ord_p(disc f) = g(g-1)
  std::optional<Rational> matrix;
  std::string status;
};
VpResult v_p_charpoly(const WeilSpec& s, int k);
// g = 1 trace ratio of the l = p M-scheme.
Rational m_scheme_ratio(int64_t p, int k, int64_t t);

// ---- products
enum class PAdicConvention { one, m_scheme };
struct ProductPolicy {
  int k_trace = 2;             // fixed k for g >= 2 trace factors
  int64_t class_from = 11;     // g >= 2: class-size formula at k = 1 from this l on
  PAdicConvention vp = PAdicConvention::one;
  uint64_t budget = kDefaultBudget;
};
EulerProduct truncated_trace_product(int g, int64_t p, int64_t t, int64_t l0, const ProductPolicy& pol = {});
EulerProduct truncated_charpoly_product(const WeilSpec& s, int64_t l0, const ProductPolicy& pol = {});

struct MassPrediction {
  double value = 0, lower = 0, upper = 0;
  bool heuristic = false;
  EulerProduct product;
  double v_inf = 0;
};
MassPrediction predicted_ppav_mass(const WeilSpec& s, int64_t l0, const ProductPolicy& pol = {});

// ---- hyperoctahedral bookkeeping
struct SigmaClass {
  SignedCycleType type;
  uint64_t size = 0;
  int a = 0;
};
std::vector<SigmaClass> a_sigma_table(int g);
int a_sigma_of(const std::vector<SigmaClass>& table, const SignedCycleType& type);

}  // namespace wl
