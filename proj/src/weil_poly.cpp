#include "weil_poly.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace wl {

namespace {

BigInt binom(int n, int k) {
  if (k < 0 || k > n) return 0;
  BigInt r = 1;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Clear denominators and return the primitive integer polynomial.
IntPolynomial clear_denominators(const RatPoly& f) {
  BigInt l = 1;
  for (const auto& c : f) l = boost::multiprecision::lcm(l, denominator(c));
  std::vector<BigInt> v;
  for (const auto& c : f) v.push_back(numerator(c) * (l / denominator(c)));
  return IntPolynomial(std::move(v)).primitive_part();
}

bool all_roots_in(const IntPolynomial& f, const Rational& lo, const Rational& hi) {
  IntPolynomial s = squarefree_part(f);
  if (s.degree() < 1) return true;
  return real_roots_in_interval(s, lo, hi) == s.degree();
}

// h(u) = E(u)^2 - u O(u)^2 where f(y) = E(y^2) + y O(y^2); roots of h are y_i^2.
IntPolynomial squared_transform(const IntPolynomial& f) {
  std::vector<BigInt> e, o;
  for (int i = 0; i <= f.degree(); ++i) (i % 2 == 0 ? e : o).push_back(f.coeff(i));
  IntPolynomial E(e), O(o);
  IntPolynomial h = E * E - IntPolynomial::from({0, 1}) * O * O;
  if (f.degree() % 2 == 1) h = BigInt(-1) * h;
  return h;
}

}  // namespace

void validate(const WeilSpec& s) {
  if (s.g < 1 || s.g > 4) fail(Errc::invalid_argument, "WeilSpec: genus must be in 1..4");
  if (static_cast<int>(s.a.size()) != s.g) fail(Errc::invalid_argument, "WeilSpec: need g coefficients");
  if (s.p < 2) fail(Errc::invalid_argument, "WeilSpec: p must be at least 2");
}

IntPolynomial assemble_f(const WeilSpec& s) {
  validate(s);
  int g = s.g;
  std::vector<BigInt> c(2 * g + 1);
  c[2 * g] = 1;
  for (int i = 1; i <= g; ++i) c[2 * g - i] = s.a[i - 1];
  // coefficient of x^{g-i} is p^i a_{g-i}, with a_0 = 1
  for (int i = 1; i <= g; ++i) {
    BigInt ai = (g - i == 0) ? BigInt(1) : BigInt(s.a[g - i - 1]);
    c[g - i] = boost::multiprecision::pow(BigInt(s.p), i) * ai;
  }
  return IntPolynomial(std::move(c));
}

std::vector<Rational> plus_coefficients(const std::vector<Rational>& a, const Rational& q) {
  int g = static_cast<int>(a.size());
  std::vector<Rational> c(g + 1);
  c[0] = 1;
  for (int i = 1; i <= g; ++i) {
    Rational acc = a[i - 1];
    Rational qj = 1;
    for (int j = 1; i - 2 * j >= 0; ++j) {
      qj *= q;
      int k = i - 2 * j;
      acc -= c[k] * Rational(binom(g - k, j)) * qj;
    }
    c[i] = acc;
  }
  return c;
}

IntPolynomial real_plus_poly(const WeilSpec& s) {
  validate(s);
  std::vector<Rational> a;
  for (auto x : s.a) a.emplace_back(x);
  auto c = plus_coefficients(a, Rational(s.p));
  std::vector<BigInt> coeffs(s.g + 1);
  for (int i = 0; i <= s.g; ++i) {
    if (denominator(c[i]) != 1) fail(Errc::internal, "real_plus_poly: non-integral coefficient");
    coeffs[s.g - i] = numerator(c[i]);
  }
  IntPolynomial fp(coeffs);
  // identity check: f(x) = sum_k c_k x^k (x^2+p)^{g-k}
  IntPolynomial xp = IntPolynomial::from({s.p, 0, 1});
  IntPolynomial acc;
  for (int k = 0; k <= s.g; ++k) {
    IntPolynomial term = IntPolynomial::monomial(numerator(c[k]), k);
    for (int j = 0; j < s.g - k; ++j) term = term * xp;
    acc = acc + term;
  }
  if (!(acc == assemble_f(s))) fail(Errc::internal, "real_plus_poly: identity f = x^g f+(x+p/x) failed");
  return fp;
}

RatPoly region_plus_poly(const RegionPoint& b) {
  auto c = plus_coefficients(b.b, Rational(1));
  int g = static_cast<int>(b.b.size());
  RatPoly out(g + 1);
  for (int i = 0; i <= g; ++i) out[g - i] = c[i];
  return out;
}

bool membership_R_g(const RegionPoint& b) {
  if (b.b.empty()) fail(Errc::invalid_argument, "membership_R_g: empty point");
  IntPolynomial f = clear_denominators(region_plus_poly(b));
  return all_roots_in(f, Rational(-2), Rational(2));
}

bool in_scaled_region(const WeilSpec& s) {
  IntPolynomial h = squared_transform(real_plus_poly(s));
  return all_roots_in(h, Rational(0), Rational(4 * s.p));
}

bool on_region_boundary(const WeilSpec& s) {
  IntPolynomial h = squared_transform(real_plus_poly(s));
  return h.eval(BigInt(4 * s.p)) == 0;
}

bool is_ordinary_weil(const WeilSpec& s) {
  validate(s);
  if (s.a[s.g - 1] % s.p == 0) return false;
  return in_scaled_region(s);
}

void for_each_ordinary_weil(int g, int64_t p, const std::function<void(const WeilSpec&)>& visit) {
  auto r = enumerate_ordinary_weil(g, p);
  for (const auto& s : r.specs) visit(s);
}

EnumerationResult enumerate_ordinary_weil(int g, int64_t p, uint64_t budget) {
  if (p < 3 || !is_prime(p)) fail(Errc::invalid_argument, "enumerate_ordinary_weil: p must be an odd prime");
  EnumerationResult out;
  auto test = [&](const std::vector<int64_t>& a) {
    if (out.candidates_tested >= budget) {
      out.truncated = true;
      return false;
    }
    ++out.candidates_tested;
    WeilSpec s{g, p, a};
    if (is_ordinary_weil(s)) out.specs.push_back(s);
    return true;
  };
  double sp = std::sqrt(static_cast<double>(p));
  if (g == 1) {
    int64_t B = isqrt(BigInt(4 * p)).convert_to<int64_t>();
    for (int64_t a1 = -B; a1 <= B; ++a1)
      if (!test({a1})) break;
  } else if (g == 2) {
    int64_t B1 = isqrt(BigInt(16 * p)).convert_to<int64_t>();
    for (int64_t a1 = -B1; a1 <= B1 && !out.truncated; ++a1) {
      // bracket of [2 sqrt p |a1| - 2p, 2p + a1^2/4], widened by one
      int64_t lo = static_cast<int64_t>(std::floor(2 * sp * std::abs(a1))) - 2 * p - 1;
      int64_t hi = 2 * p + (a1 * a1) / 4 + 1;
      for (int64_t a2 = lo; a2 <= hi; ++a2)
        if (!test({a1, a2})) break;
    }
  } else if (g == 3) {
    int64_t B1 = static_cast<int64_t>(std::ceil(6 * sp));
    int64_t B2 = 15 * p;
    int64_t B3 = static_cast<int64_t>(std::ceil(20 * p * sp));
    for (int64_t a1 = -B1; a1 <= B1 && !out.truncated; ++a1)
      for (int64_t a2 = -B2; a2 <= B2 && !out.truncated; ++a2)
        for (int64_t a3 = -B3; a3 <= B3; ++a3)
          if (!test({a1, a2, a3})) break;
  } else {
    fail(Errc::unsupported, "enumerate_ordinary_weil: genus above 3");
  }
  return out;
}

std::vector<int> required_split_types(int g) {
  std::set<int> s;
  for (int t : {2, 4, 2 * g - 2, 2 * g})
    if (t >= 2 && t <= 2 * g) s.insert(t);
  return {s.begin(), s.end()};
}

GaloisDiagnosis galois_generic_test(const WeilSpec& s, int64_t prime_budget) {
  IntPolynomial f = assemble_f(s);
  if (!is_irreducible_over_Z(f)) fail(Errc::invalid_argument, "galois_generic_test: f is reducible");
  GaloisDiagnosis d;
  d.required = required_split_types(s.g);
  BigInt disc = discriminant(f);
  for (int64_t q : primes_up_to(prime_budget)) {
    if (s.p % q == 0 || disc % q == 0) continue;
    FactorMultiset fm = factor_mod_l(f, q);
    if (!fm.squarefree()) continue;
    auto degs = fm.degrees();
    int nonlinear = 0, big = 0;
    for (int dd : degs)
      if (dd > 1) {
        ++nonlinear;
        big = dd;
      }
    if (nonlinear != 1) continue;
    if (std::find(d.required.begin(), d.required.end(), big) == d.required.end()) continue;
    d.witnesses.emplace(big, q);
    if (d.witnesses.size() == d.required.size()) break;
  }
  if (d.witnesses.size() == d.required.size()) d.verdict = GaloisVerdict::ProvedGeneric;
  return d;
}

DiscReport disc_valuation_report(const WeilSpec& s, int64_t trial_bound) {
  DiscReport r;
  r.disc = discriminant(assemble_f(s));
  if (r.disc == 0) fail(Errc::degenerate_input, "disc_valuation_report: zero discriminant");
  r.ord_p = valuation(r.disc, s.p);
  BigInt x = abs(r.disc);
  for (int64_t q : primes_up_to(trial_bound)) {
    if (x == 1) break;
    int v = 0;
    while (x % q == 0) {
      x /= q;
      ++v;
    }
    if (v > 0) r.ord_l[q] = v;
  }
  r.cofactor = x;
  return r;
}

}  // namespace wl
