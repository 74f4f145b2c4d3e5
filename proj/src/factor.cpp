// Factorization over prime fields (squarefree, distinct-degree, equal-degree)
// and an irreducibility test over Z by Hensel lifting plus recombination.

#include <algorithm>
#include <map>
#include <random>

#include "algebra.hpp"

namespace wl {

namespace {

using fp::Poly;

std::vector<std::pair<Poly, int>> squarefree_decomp(const Poly& f0, int64_t l) {
  std::vector<std::pair<Poly, int>> out;
  Poly f = fp::monic(f0, l);
  if (f.size() <= 1) return out;
  Poly d = fp::derivative(f, l);
  if (d.empty()) {
    // f is an l-th power
    Poly root;
    for (size_t i = 0; i < f.size(); i += l) root.push_back(f[i]);
    for (auto& [g, e] : squarefree_decomp(root, l)) out.emplace_back(g, e * static_cast<int>(l));
    return out;
  }
  Poly c = fp::gcd(f, d, l);
  Poly q, r;
  fp::divmod(f, c, l, q, r);
  Poly w = q;
  int i = 1;
  while (w.size() > 1) {
    Poly y = fp::gcd(w, c, l);
    Poly z;
    fp::divmod(w, y, l, z, r);
    if (z.size() > 1) out.emplace_back(fp::monic(z, l), i);
    ++i;
    w = y;
    fp::divmod(c, y, l, q, r);
    c = q;
  }
  if (c.size() > 1) {
    Poly root;
    for (size_t k = 0; k < c.size(); k += l) root.push_back(c[k]);
    for (auto& [g, e] : squarefree_decomp(root, l)) out.emplace_back(g, e * static_cast<int>(l));
  }
  return out;
}

std::vector<std::pair<Poly, int>> distinct_degree(Poly f, int64_t l) {
  std::vector<std::pair<Poly, int>> out;
  Poly x{0, 1};
  Poly h = fp::rem(x, f, l);
  int d = 0;
  while (static_cast<int>(f.size()) - 1 >= 2 * (d + 1)) {
    ++d;
    h = fp::powmod(h, BigInt(l), f, l);
    Poly g = fp::gcd(fp::sub(h, x, l), f, l);
    if (g.size() > 1) {
      out.emplace_back(g, d);
      Poly q, r;
      fp::divmod(f, g, l, q, r);
      f = q;
      h = fp::rem(h, f, l);
    }
  }
  if (f.size() > 1) out.emplace_back(fp::monic(f, l), static_cast<int>(f.size()) - 1);
  return out;
}

void equal_degree(const Poly& f, int d, int64_t l, std::mt19937_64& rng, std::vector<Poly>& out) {
  int n = static_cast<int>(f.size()) - 1;
  if (n == d) {
    out.push_back(fp::monic(f, l));
    return;
  }
  std::uniform_int_distribution<int64_t> coef(0, l - 1);
  for (;;) {
    Poly a(n);
    for (auto& x : a) x = coef(rng);
    fp::trim(a);
    if (a.size() <= 1) continue;
    Poly b;
    if (l == 2) {
      // trace map to F_2
      Poly t = a, s = a;
      for (int i = 1; i < d; ++i) {
        t = fp::mulmod(t, t, f, l);
        s = fp::add(s, t, l);
      }
      b = s;
    } else {
      BigInt e = (boost::multiprecision::pow(BigInt(l), d) - 1) / 2;
      b = fp::sub(fp::powmod(a, e, f, l), Poly{1}, l);
    }
    Poly g = fp::gcd(b, f, l);
    int dg = static_cast<int>(g.size()) - 1;
    if (dg > 0 && dg < n) {
      Poly q, r;
      fp::divmod(f, g, l, q, r);
      equal_degree(g, d, l, rng, out);
      equal_degree(fp::monic(q, l), d, l, rng, out);
      return;
    }
  }
}

}  // namespace

FactorMultiset factor_mod_l(const ResiduePolynomial& f, uint64_t seed) {
  int64_t l = f.modulus();
  if (!is_prime(l)) fail(Errc::invalid_argument, "factor_mod_l: modulus not prime");
  if (f.is_zero()) fail(Errc::degenerate_input, "factor_mod_l: polynomial vanishes mod l");
  FactorMultiset out;
  out.l = l;
  std::mt19937_64 rng(seed);
  std::map<ResiduePolynomial, int> acc;
  for (auto& [sq, e] : squarefree_decomp(f.coeffs(), l)) {
    for (auto& [g, d] : distinct_degree(sq, l)) {
      std::vector<Poly> parts;
      equal_degree(g, d, l, rng, parts);
      for (auto& p : parts) acc[ResiduePolynomial(l, p)] += e;
    }
  }
  for (auto& [p, e] : acc) out.factors.emplace_back(p, e);
  std::sort(out.factors.begin(), out.factors.end(), [](const auto& a, const auto& b) {
    if (a.first.degree() != b.first.degree()) return a.first.degree() < b.first.degree();
    return a.first.coeffs() < b.first.coeffs();
  });
  return out;
}

FactorMultiset factor_mod_l(const IntPolynomial& f, int64_t l, uint64_t seed) {
  return factor_mod_l(ResiduePolynomial::reduce(f, l), seed);
}

// ---------------------------------------------------------------- over Z

namespace {

IntPolynomial symmetric_mod(const IntPolynomial& f, const BigInt& M) {
  std::vector<BigInt> v = f.coeffs();
  BigInt half = M / 2;
  for (auto& x : v) {
    x %= M;
    if (x < 0) x += M;
    if (x > half) x -= M;
  }
  return IntPolynomial(std::move(v));
}

Poly to_fp(const IntPolynomial& f, int64_t q) {
  Poly v;
  for (const auto& x : f.coeffs()) {
    BigInt r = x % q;
    if (r < 0) r += q;
    v.push_back(r.convert_to<int64_t>());
  }
  fp::trim(v);
  return v;
}

IntPolynomial from_fp(const Poly& p) {
  std::vector<BigInt> v(p.begin(), p.end());
  return IntPolynomial(std::move(v));
}

// Extended gcd over F_q: s*a + t*b = 1.
void ext_gcd(const Poly& a, const Poly& b, int64_t q, Poly& s, Poly& t) {
  Poly r0 = a, r1 = b, s0{1}, s1{}, t0{}, t1{1};
  while (!r1.empty()) {
    Poly qq, rr;
    fp::divmod(r0, r1, q, qq, rr);
    r0 = r1;
    r1 = rr;
    Poly ns = fp::sub(s0, fp::mul(qq, s1, q), q);
    Poly nt = fp::sub(t0, fp::mul(qq, t1, q), q);
    s0 = s1;
    s1 = ns;
    t0 = t1;
    t1 = nt;
  }
  if (r0.size() != 1) fail(Errc::internal, "ext_gcd: factors not coprime");
  int64_t inv = invmod(r0[0], q);
  for (auto& x : s0) x = x * inv % q;
  for (auto& x : t0) x = x * inv % q;
  s = s0;
  t = t0;
}

// Lift f = g*h (mod q) to mod q^e with g, h monic.
void hensel_pair(const IntPolynomial& f, IntPolynomial& g, IntPolynomial& h, int64_t q, int e) {
  Poly gq = to_fp(g, q), hq = to_fp(h, q), s, t;
  ext_gcd(gq, hq, q, s, t);
  BigInt M = q;
  for (int j = 1; j < e; ++j) {
    IntPolynomial diff = f - g * h;
    std::vector<BigInt> dv = diff.coeffs();
    for (auto& x : dv) {
      if (x % M != 0) fail(Errc::internal, "hensel_pair: invariant broken");
      x /= M;
    }
    Poly ep = to_fp(IntPolynomial(dv), q);
    Poly dg = fp::rem(fp::mul(t, ep, q), gq, q);
    Poly num = fp::sub(ep, fp::mul(hq, dg, q), q);
    Poly dh, rr;
    fp::divmod(num, gq, q, dh, rr);
    if (!rr.empty()) fail(Errc::internal, "hensel_pair: division not exact");
    g = g + M * from_fp(dg);
    h = h + M * from_fp(dh);
    M *= q;
    g = symmetric_mod(g, M);
    h = symmetric_mod(h, M);
  }
}

}  // namespace

bool is_irreducible_over_Z(const IntPolynomial& f) {
  int n = f.degree();
  if (n > 16) fail(Errc::invalid_argument, "is_irreducible_over_Z: degree above 16");
  if (n < 1) return false;
  if (f.lc() != 1) fail(Errc::invalid_argument, "is_irreducible_over_Z: polynomial not monic");
  if (n == 1) return true;
  if (gcd(f, f.derivative()).degree() > 0) return false;
  BigInt disc = discriminant(f);

  // pick the prime with fewest factors among a handful of good primes
  int64_t q = 0;
  FactorMultiset best;
  int tried = 0;
  for (int64_t c = 3; tried < 6; c += 2) {
    if (!is_prime(c) || disc % c == 0) continue;
    ++tried;
    FactorMultiset fm = factor_mod_l(f, c);
    if (fm.factors.size() == 1) return true;
    if (q == 0 || fm.factors.size() < best.factors.size()) {
      q = c;
      best = fm;
    }
  }

  // Mignotte-style bound on coefficients of any monic factor.
  BigInt norm2 = 0;
  for (const auto& x : f.coeffs()) norm2 += x * x;
  BigInt B = (isqrt(norm2) + 1) * (BigInt(1) << n);
  int e = 1;
  BigInt M = q;
  while (M <= 2 * B) {
    M *= q;
    ++e;
  }

  std::vector<IntPolynomial> lifted;
  IntPolynomial rest = f;
  for (size_t i = 0; i + 1 < best.factors.size(); ++i) {
    IntPolynomial g = from_fp(best.factors[i].first.coeffs());
    Poly restq = to_fp(rest, q), hq, rr;
    fp::divmod(restq, best.factors[i].first.coeffs(), q, hq, rr);
    IntPolynomial h = from_fp(hq);
    hensel_pair(rest, g, h, q, e);
    lifted.push_back(g);
    rest = h;
  }
  lifted.push_back(rest);

  size_t r = lifted.size();
  for (uint32_t mask = 1; mask < (1u << r) - 1; ++mask) {
    int deg = 0;
    for (size_t i = 0; i < r; ++i)
      if (mask & (1u << i)) deg += lifted[i].degree();
    if (2 * deg > n) continue;
    IntPolynomial prod = IntPolynomial::from({1});
    for (size_t i = 0; i < r; ++i)
      if (mask & (1u << i)) prod = symmetric_mod(prod * lifted[i], M);
    try {
      IntPolynomial qq = exact_div(f, prod);
      if (qq.degree() >= 1) return false;
    } catch (const Error&) {
    }
  }
  return true;
}

}  // namespace wl
