#include "curves.hpp"

#include <array>
#include <sstream>
#include <vector>

namespace wl {

namespace {

// Degree of gcd(F, F') over F_p for F of degree <= 6, coefficients lowest first.
bool squarefree_small(const int64_t* c, int deg, int64_t p, const std::vector<int64_t>& inv) {
  std::array<int64_t, 7> a{}, b{};
  for (int i = 0; i <= deg; ++i) a[i] = c[i];
  int da = deg, db = deg - 1;
  for (int i = 1; i <= deg; ++i) b[i - 1] = c[i] * i % p;
  while (db >= 0 && b[db] == 0) --db;
  while (db >= 0) {
    // a <- a mod b
    int64_t ib = inv[b[db]];
    while (da >= db) {
      int64_t f = a[da] * ib % p;
      if (f != 0)
        for (int i = 0; i <= db; ++i) a[da - db + i] = (a[da - db + i] + (p - f) * b[i]) % p;
      --da;
      while (da >= 0 && a[da] == 0) --da;
    }
    std::swap(a, b);
    std::swap(da, db);
  }
  return da == 0;
}

}  // namespace

TraceDistribution elliptic_trace_distribution(int64_t p) {
  if (p < 5 || !is_prime(p)) fail(Errc::unsupported, "elliptic_trace_distribution: p must be a prime >= 5");
  TraceDistribution d;
  d.p = p;
  d.genus = 1;
  d.group_order = p - 1;
  std::vector<int> chi(p);
  for (int64_t r = 0; r < p; ++r) chi[r] = legendre(r, p);
  std::map<int64_t, uint64_t> hist;
  for (int64_t a = 0; a < p; ++a)
    for (int64_t b = 0; b < p; ++b) {
      if (mod(4 * a * a % p * a + 27 * b * b, p) == 0) continue;
      int64_t s = 0;
      for (int64_t x = 0; x < p; ++x) s += chi[(x * x % p * x + a * x + b) % p];
      hist[-s] += 1;
      ++d.models;
    }
  for (auto& [t, n] : hist) {
    d.mass[t] = Rational(n, p - 1);
    d.total += d.mass[t];
  }
  return d;
}

TraceDistribution genus2_trace_distribution(int64_t p) {
  if (p < 3 || p > 13 || !is_prime(p)) fail(Errc::unsupported, "genus2_trace_distribution: p must be a prime in [3, 13]");
  TraceDistribution d;
  d.p = p;
  d.genus = 2;
  d.group_order = BigInt(p * p - 1) * (p * p - p);
  std::vector<int> chi(p);
  for (int64_t r = 0; r < p; ++r) chi[r] = legendre(r, p);
  std::vector<int64_t> inv(p, 0);
  for (int64_t x = 1; x < p; ++x) inv[x] = invmod(x, p);
  std::vector<int64_t> xp(p * 7);
  for (int64_t x = 0; x < p; ++x) {
    int64_t v = 1;
    for (int i = 0; i <= 6; ++i) {
      xp[x * 7 + i] = v;
      v = v * x % p;
    }
  }
  // Each model is a unit multiple of one whose first nonzero coefficient from
  // the top is 1; a nonsquare multiple flips the trace (quadratic twist).
  std::map<int64_t, uint64_t> hist;
  uint64_t normalized = 0;
  std::vector<int64_t> v(p);
  int64_t c[7];
  for (int top = 6; top >= 5; --top) {
    int64_t free_hi = ipow(p, top - 1);  // c_1..c_{top-1}
    for (int64_t idx = 0; idx < free_hi; ++idx) {
      for (int i = 0; i <= 6; ++i) c[i] = 0;
      c[top] = 1;
      int64_t y = idx;
      for (int i = 1; i < top; ++i) {
        c[i] = y % p;
        y /= p;
      }
      for (int64_t x = 0; x < p; ++x) {
        int64_t s = 0;
        for (int i = 1; i <= top; ++i) s += c[i] * xp[x * 7 + i];
        v[x] = s % p;
      }
      int chi_inf = top == 6 ? 1 : 0;
      for (int64_t c0 = 0; c0 < p; ++c0) {
        c[0] = c0;
        if (!squarefree_small(c, top, p, inv)) continue;
        int64_t s = chi_inf;
        for (int64_t x = 0; x < p; ++x) s += chi[(v[x] + c0) % p];
        hist[-s] += 1;
        ++normalized;
      }
    }
  }
  d.models = normalized * (p - 1);
  Rational half(p - 1, 2);
  for (auto& [t, n] : hist) {
    Rational m = Rational(n) * half / Rational(d.group_order);
    d.mass[t] += m;
    d.mass[-t] += m;
  }
  for (auto& [t, m] : d.mass) d.total += m;
  return d;
}

Rational isogeny_class_mass(int64_t p, int64_t t) {
  if (t * t >= 4 * p || mod(t, p) == 0) fail(Errc::invalid_argument, "isogeny_class_mass: t is not an ordinary trace");
  TraceDistribution d = elliptic_trace_distribution(p);
  auto it = d.mass.find(t);
  return it == d.mass.end() ? Rational(0) : it->second;
}

std::string distribution_csv(const TraceDistribution& d) {
  std::ostringstream os;
  os << "p,genus,t,mass_num,mass_den,normalized_mass\n";
  for (const auto& [t, m] : d.mass) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", static_cast<double>(m / d.total));
    os << d.p << "," << d.genus << "," << t << "," << numerator(m) << "," << denominator(m) << "," << buf << "\n";
  }
  return os.str();
}

}  // namespace wl
