#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <vector>

#include "algebra.hpp"

namespace wl {

struct WeilSpec {
  int g = 1;
  int64_t p = 0;
  std::vector<int64_t> a;  // a_1..a_g

  // Frobenius trace, the sum of the roots of f.
  int64_t trace() const { return -a.at(0); }
};

struct RegionPoint {
  std::vector<Rational> b;
};

enum class GaloisVerdict { ProvedGeneric, Unknown };

struct GaloisDiagnosis {
  GaloisVerdict verdict = GaloisVerdict::Unknown;
  std::map<int, int64_t> witnesses;  // splitting type -> prime realizing it
  std::vector<int> required;
};

struct DiscReport {
  BigInt disc;
  int ord_p = 0;
  std::map<int64_t, int> ord_l;  // small primes dividing disc
  BigInt cofactor;               // part of |disc| left after trial division
};

void validate(const WeilSpec& s);

IntPolynomial assemble_f(const WeilSpec& s);
IntPolynomial real_plus_poly(const WeilSpec& s);
// Coefficients c_i of the real polynomial x^g + c_1 x^{g-1} + ... for a
// palindromic pattern with weight q, from the top coefficients a_i.
std::vector<Rational> plus_coefficients(const std::vector<Rational>& a, const Rational& q);
// g_b^+ with roots 2cos(theta_j), as a rational polynomial (lowest first).
RatPoly region_plus_poly(const RegionPoint& b);

bool membership_R_g(const RegionPoint& b);
// Exact test that f^+ has all its roots in [-2 sqrt p, 2 sqrt p].
bool in_scaled_region(const WeilSpec& s);
bool is_ordinary_weil(const WeilSpec& s);
// Point flagged by reports: f^+ has a root exactly at +-2 sqrt p.
bool on_region_boundary(const WeilSpec& s);

struct EnumerationResult {
  std::vector<WeilSpec> specs;
  uint64_t candidates_tested = 0;
  bool truncated = false;
};

// Lexicographic in a; g in {1,2} is the full-enumeration range, g=3 is allowed
// with an explicit budget on candidates.
EnumerationResult enumerate_ordinary_weil(int g, int64_t p, uint64_t budget = 2000000000ULL);
void for_each_ordinary_weil(int g, int64_t p, const std::function<void(const WeilSpec&)>& visit);

std::vector<int> required_split_types(int g);
GaloisDiagnosis galois_generic_test(const WeilSpec& s, int64_t prime_budget);
DiscReport disc_valuation_report(const WeilSpec& s, int64_t trial_bound = 100000);

}  // namespace wl
