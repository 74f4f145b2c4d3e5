#include "class_count.hpp"

#include <functional>
#include <map>

#include "symplectic.hpp"

namespace wl {

namespace {

BigInt gl_order(int m, const BigInt& q) {
  BigInt r = pow(q, m * (m - 1) / 2);
  for (int i = 1; i <= m; ++i) r *= pow(q, i) - 1;
  return r;
}

BigInt unitary_order(int m, const BigInt& q) {
  BigInt r = pow(q, m * (m - 1) / 2);
  for (int i = 1; i <= m; ++i) r *= pow(q, i) - ((i % 2) ? -1 : 1);
  return r;
}

BigInt sp_order_q(int n, const BigInt& q) {
  BigInt r = pow(q, n * n);
  for (int i = 1; i <= n; ++i) r *= pow(q, 2 * i) - 1;
  return r;
}

// P*(x) = x^d P(mu/x) / P(0), monic.
fp::Poly dual(const fp::Poly& P, int64_t mu, int64_t l) {
  int d = static_cast<int>(P.size()) - 1;
  fp::Poly Q(d + 1);
  int64_t mi = 1;
  for (int i = 0; i <= d; ++i) {
    Q[d - i] = P[i] * mi % l;
    mi = mi * mu % l;
  }
  return fp::monic(Q, l);
}

}  // namespace

BigInt class_count(int g, int64_t p, int64_t l, const ResiduePolynomial& f) {
  if (l == 2 || !is_prime(l)) fail(Errc::invalid_argument, "class_count: l must be an odd prime");
  if (mod(p, l) == 0) fail(Errc::invalid_argument, "class_count: l = p");
  if (f.modulus() != l || f.degree() != 2 * g || f.lc() != 1)
    fail(Errc::invalid_argument, "class_count: f must be monic of degree 2g mod l");
  int64_t mu = mod(p, l);
  for (int i = 1; i <= g; ++i)
    if (mod(f.coeff(g - i) - powmod(mu, i, l) * f.coeff(g + i), l) != 0) return 0;
  FactorMultiset fm = factor_mod_l(f);
  std::map<fp::Poly, int> mult;
  for (auto& [P, e] : fm.factors) mult[P.coeffs()] += e;
  BigInt L = l;
  BigInt num = sp_order(g, l), den = 1;
  int unip = 0;
  std::map<fp::Poly, bool> done;
  for (auto& [P, m] : mult) {
    if (done[P]) continue;
    done[P] = true;
    int d = static_cast<int>(P.size()) - 1;
    fp::Poly Ps = dual(P, mu, l);
    if (Ps != P) {
      auto it = mult.find(Ps);
      if (it == mult.end() || it->second != m) return 0;
      done[Ps] = true;
      den *= gl_order(m, pow(L, d));
      unip += d * (m * m - m);
      continue;
    }
    // self-dual: roots fixed by alpha -> mu/alpha exactly when P | x^2 - mu
    bool fixed_roots = (d == 1) || (d == 2 && P[1] == 0 && P[0] == mod(-mu, l));
    if (fixed_roots) {
      if (m % 2) return 0;
      int n = m / 2;
      den *= sp_order_q(n, pow(L, d));
      unip += d * 2 * n * n;
    } else {
      if (d % 2) fail(Errc::internal, "class_count: self-dual factor of odd degree");
      den *= unitary_order(m, pow(L, d / 2));
      unip += (d / 2) * (m * m - m);
    }
  }
  num *= pow(L, unip);
  if (num % den != 0) fail(Errc::internal, "class_count: non-integral class count");
  return num / den;
}

std::vector<BigInt> class_trace_table(int g, int64_t p, int64_t l) {
  if (g < 1 || g > 3) fail(Errc::invalid_argument, "class_trace_table: g must be 1..3");
  int64_t mu = mod(p, l);
  std::vector<BigInt> N(l, 0);
  int64_t combos = ipow(l, g);
  for (int64_t c = 0; c < combos; ++c) {
    std::vector<int64_t> f(2 * g + 1, 0);
    f[2 * g] = 1;
    int64_t y = c;
    for (int i = 1; i <= g; ++i) {
      f[2 * g - i] = y % l;
      y /= l;
    }
    for (int i = 1; i <= g; ++i) {
      int64_t ai = (g - i == 0) ? 1 : f[2 * g - (g - i)];
      f[g - i] = powmod(mu, i, l) * ai % l;
    }
    N[mod(-f[2 * g - 1], l)] += class_count(g, p, l, ResiduePolynomial(l, f));
  }
  return N;
}

}  // namespace wl
