#include "algebra.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace wl {

void fail(Errc c, const std::string& what) { throw Error(c, what); }

int64_t mod(int64_t a, int64_t m) {
  int64_t r = a % m;
  return r < 0 ? r + m : r;
}

int64_t powmod(int64_t b, int64_t e, int64_t m) {
  __int128 r = 1 % m, x = mod(b, m);
  while (e > 0) {
    if (e & 1) r = r * x % m;
    x = x * x % m;
    e >>= 1;
  }
  return static_cast<int64_t>(r);
}

int64_t invmod(int64_t a, int64_t m) {
  int64_t g = m, x = 0, x1 = 1, r = mod(a, m);
  while (r != 0) {
    int64_t q = g / r;
    std::tie(g, r) = std::make_pair(r, g - q * r);
    std::tie(x, x1) = std::make_pair(x1, x - q * x1);
  }
  if (g != 1) fail(Errc::invalid_argument, "invmod: not invertible");
  return mod(x, m);
}

int64_t ipow(int64_t b, int e) {
  int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

bool is_prime(int64_t n) {
  if (n < 2) return false;
  for (int64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::vector<int64_t> primes_up_to(int64_t n) {
  std::vector<int64_t> out;
  if (n < 2) return out;
  std::vector<char> sieve(n + 1, 1);
  for (int64_t i = 2; i <= n; ++i) {
    if (!sieve[i]) continue;
    out.push_back(i);
    for (int64_t j = i * i; j <= n; j += i) sieve[j] = 0;
  }
  return out;
}

int valuation(const BigInt& n, int64_t l) {
  if (n == 0) fail(Errc::degenerate_input, "valuation of zero");
  BigInt x = abs(n);
  int v = 0;
  while (x % l == 0) {
    x /= l;
    ++v;
  }
  return v;
}

int valuation(int64_t n, int64_t l) { return valuation(BigInt(n), l); }

int legendre(int64_t a, int64_t p) {
  a = mod(a, p);
  if (a == 0) return 0;
  return powmod(a, (p - 1) / 2, p) == 1 ? 1 : -1;
}

BigInt isqrt(const BigInt& n) {
  if (n < 0) fail(Errc::invalid_argument, "isqrt of negative");
  return boost::multiprecision::sqrt(n);
}

std::string to_string(const Rational& q) {
  std::ostringstream os;
  os << numerator(q) << "/" << denominator(q);
  return os.str();
}

// ---------------------------------------------------------------- IntPolynomial

IntPolynomial::IntPolynomial(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) { trim(); }

IntPolynomial IntPolynomial::from(std::initializer_list<int64_t> coeffs) {
  std::vector<BigInt> v;
  for (auto x : coeffs) v.emplace_back(x);
  return IntPolynomial(std::move(v));
}

IntPolynomial IntPolynomial::monomial(const BigInt& c, int deg) {
  std::vector<BigInt> v(deg + 1);
  v[deg] = c;
  return IntPolynomial(std::move(v));
}

void IntPolynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

BigInt IntPolynomial::coeff(int i) const {
  return (i >= 0 && i < static_cast<int>(c_.size())) ? c_[i] : BigInt(0);
}

const BigInt& IntPolynomial::lc() const {
  if (c_.empty()) fail(Errc::invalid_argument, "leading coefficient of zero polynomial");
  return c_.back();
}

BigInt IntPolynomial::content() const {
  BigInt g = 0;
  for (const auto& x : c_) g = boost::multiprecision::gcd(g, x);
  return g;
}

IntPolynomial IntPolynomial::derivative() const {
  std::vector<BigInt> d;
  for (size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<int64_t>(i));
  return IntPolynomial(std::move(d));
}

IntPolynomial IntPolynomial::primitive_part() const {
  if (c_.empty()) return *this;
  BigInt g = content();
  if (c_.back() < 0) g = -g;
  std::vector<BigInt> v = c_;
  for (auto& x : v) x /= g;
  return IntPolynomial(std::move(v));
}

BigInt IntPolynomial::eval(const BigInt& x) const {
  BigInt r = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
  return r;
}

Rational IntPolynomial::eval(const Rational& x) const {
  Rational r = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + Rational(*it);
  return r;
}

long double IntPolynomial::eval(long double x) const {
  long double r = 0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + it->convert_to<long double>();
  return r;
}

IntPolynomial IntPolynomial::scale_arg(const BigInt& c) const {
  std::vector<BigInt> v = c_;
  BigInt pw = 1;
  for (auto& x : v) {
    x *= pw;
    pw *= c;
  }
  return IntPolynomial(std::move(v));
}

IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b) {
  std::vector<BigInt> v(std::max(a.c_.size(), b.c_.size()));
  for (size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) v[i] += b.c_[i];
  return IntPolynomial(std::move(v));
}

IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b) {
  std::vector<BigInt> v(std::max(a.c_.size(), b.c_.size()));
  for (size_t i = 0; i < a.c_.size(); ++i) v[i] += a.c_[i];
  for (size_t i = 0; i < b.c_.size(); ++i) v[i] -= b.c_[i];
  return IntPolynomial(std::move(v));
}

IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b) {
  if (a.is_zero() || b.is_zero()) return {};
  std::vector<BigInt> v(a.c_.size() + b.c_.size() - 1);
  for (size_t i = 0; i < a.c_.size(); ++i)
    for (size_t j = 0; j < b.c_.size(); ++j) v[i + j] += a.c_[i] * b.c_[j];
  return IntPolynomial(std::move(v));
}

IntPolynomial operator*(const BigInt& s, const IntPolynomial& a) {
  std::vector<BigInt> v = a.c_;
  for (auto& x : v) x *= s;
  return IntPolynomial(std::move(v));
}

std::string IntPolynomial::str() const {
  if (c_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = degree(); i >= 0; --i) {
    const BigInt& x = c_[i];
    if (x == 0) continue;
    BigInt ax = abs(x);
    if (!first) os << (x < 0 ? " - " : " + ");
    else if (x < 0) os << "-";
    first = false;
    if (ax != 1 || i == 0) os << ax;
    if (i >= 1) os << "x";
    if (i >= 2) os << "^" << i;
  }
  return os.str();
}

IntPolynomial pseudo_rem(const IntPolynomial& a, const IntPolynomial& b) {
  if (b.is_zero()) fail(Errc::invalid_argument, "pseudo_rem by zero");
  std::vector<BigInt> r = a.coeffs();
  const auto& bc = b.coeffs();
  int db = b.degree();
  int e = a.degree() - db + 1;
  const BigInt& lb = b.lc();
  while (static_cast<int>(r.size()) - 1 >= db && !r.empty()) {
    int dr = static_cast<int>(r.size()) - 1;
    BigInt lr = r.back();
    for (auto& x : r) x *= lb;
    for (int i = 0; i <= db; ++i) r[dr - db + i] -= lr * bc[i];
    --e;
    while (!r.empty() && r.back() == 0) r.pop_back();
  }
  IntPolynomial rem(std::move(r));
  if (e > 0) rem = BigInt(pow(lb, e)) * rem;
  return rem;
}

IntPolynomial exact_div(const IntPolynomial& a, const IntPolynomial& b) {
  if (b.is_zero()) fail(Errc::invalid_argument, "exact_div by zero");
  std::vector<BigInt> r = a.coeffs();
  const auto& bc = b.coeffs();
  int db = b.degree();
  if (a.degree() < db) {
    if (!a.is_zero()) fail(Errc::internal, "exact_div: not divisible");
    return {};
  }
  std::vector<BigInt> q(a.degree() - db + 1);
  for (int i = a.degree(); i >= db; --i) {
    if (r[i] == 0) continue;
    BigInt qq = r[i] / b.lc();
    if (qq * b.lc() != r[i]) fail(Errc::internal, "exact_div: not divisible");
    q[i - db] = qq;
    for (int j = 0; j <= db; ++j) r[i - db + j] -= qq * bc[j];
  }
  for (const auto& x : r)
    if (x != 0) fail(Errc::internal, "exact_div: nonzero remainder");
  return IntPolynomial(std::move(q));
}

IntPolynomial gcd(const IntPolynomial& a0, const IntPolynomial& b0) {
  IntPolynomial a = a0.primitive_part(), b = b0.primitive_part();
  BigInt c = boost::multiprecision::gcd(a0.content(), b0.content());
  if (a.is_zero()) return b0.primitive_part();
  if (b.is_zero()) return a;
  if (a.degree() < b.degree()) std::swap(a, b);
  while (!b.is_zero()) {
    IntPolynomial r = pseudo_rem(a, b);
    a = b;
    b = r.primitive_part();
  }
  (void)c;
  return a.primitive_part();
}

IntPolynomial squarefree_part(const IntPolynomial& f) {
  if (f.degree() < 1) return f;
  IntPolynomial g = gcd(f, f.derivative());
  return exact_div(f.primitive_part(), g);
}

// Subresultant chain, following the classical fraction-free scheme over a UFD.
BigInt resultant(const IntPolynomial& f, const IntPolynomial& g) {
  if (f.is_zero() || g.is_zero()) fail(Errc::invalid_argument, "resultant of zero polynomial");
  IntPolynomial A = f, B = g;
  int s = 1;
  if (A.degree() < B.degree()) {
    std::swap(A, B);
    if ((A.degree() & 1) && (B.degree() & 1)) s = -s;
  }
  if (B.degree() == 0) return s * pow(B.lc(), A.degree());
  BigInt a = A.content(), b = B.content();
  BigInt t = pow(a, B.degree()) * pow(b, A.degree());
  A = exact_div(A, IntPolynomial({a}));
  B = exact_div(B, IntPolynomial({b}));
  BigInt gg = 1, h = 1;
  for (;;) {
    int delta = A.degree() - B.degree();
    if ((A.degree() & 1) && (B.degree() & 1)) s = -s;
    IntPolynomial R = pseudo_rem(A, B);
    if (R.is_zero()) return 0;
    A = B;
    BigInt div = gg * pow(h, delta);
    B = exact_div(R, IntPolynomial({div}));
    gg = A.lc();
    if (delta == 0) {
      // h unchanged
    } else {
      BigInt num = pow(gg, delta);
      BigInt den = pow(h, delta - 1);
      h = num / den;
    }
    if (B.degree() == 0) break;
  }
  int dA = A.degree();
  BigInt num = pow(B.lc(), dA);
  BigInt res;
  if (dA >= 1) res = num / pow(h, dA - 1);
  else res = num * h;
  return s * t * res;
}

BigInt discriminant(const IntPolynomial& f) {
  int d = f.degree();
  if (d < 1) fail(Errc::invalid_argument, "discriminant of constant polynomial");
  if (d == 1) return 1;
  BigInt r = resultant(f, f.derivative());
  BigInt q = r / f.lc();
  if (q * f.lc() != r) fail(Errc::internal, "discriminant: lc does not divide resultant");
  long sgn = ((static_cast<long>(d) * (d - 1) / 2) % 2) ? -1 : 1;
  return sgn * q;
}

// ----------------------------------------------------------------- Sturm chains

RatPoly to_rat(const IntPolynomial& f) {
  RatPoly r;
  for (const auto& x : f.coeffs()) r.emplace_back(x);
  return r;
}

namespace {

void rtrim(RatPoly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

RatPoly rderiv(const RatPoly& a) {
  RatPoly d;
  for (size_t i = 1; i < a.size(); ++i) d.push_back(a[i] * static_cast<int64_t>(i));
  rtrim(d);
  return d;
}

RatPoly rrem(RatPoly a, const RatPoly& b) {
  int db = static_cast<int>(b.size()) - 1;
  while (static_cast<int>(a.size()) - 1 >= db && !a.empty()) {
    int da = static_cast<int>(a.size()) - 1;
    Rational q = a.back() / b.back();
    for (int i = 0; i <= db; ++i) a[da - db + i] -= q * b[i];
    a.pop_back();
    rtrim(a);
  }
  return a;
}

Rational reval(const RatPoly& a, const Rational& x) {
  Rational r = 0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) r = r * x + *it;
  return r;
}

std::vector<RatPoly> sturm_chain(RatPoly f) {
  rtrim(f);
  std::vector<RatPoly> chain{f};
  RatPoly d = rderiv(f);
  if (d.empty()) return chain;
  chain.push_back(d);
  for (;;) {
    RatPoly r = rrem(chain[chain.size() - 2], chain.back());
    if (r.empty()) break;
    for (auto& x : r) x = -x;
    chain.push_back(r);
  }
  return chain;
}

int sign_changes(const std::vector<RatPoly>& chain, const Rational& x) {
  int changes = 0, last = 0;
  for (const auto& p : chain) {
    Rational v = reval(p, x);
    int s = (v > 0) - (v < 0);
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

int real_roots_in_interval(const RatPoly& f0, const Rational& lo, const Rational& hi) {
  if (!(lo < hi)) fail(Errc::invalid_argument, "real_roots_in_interval: lo >= hi");
  RatPoly f = f0;
  rtrim(f);
  if (f.empty()) fail(Errc::invalid_argument, "real_roots_in_interval: zero polynomial");
  auto chain = sturm_chain(f);
  if (chain.back().size() > 1) fail(Errc::internal, "real_roots_in_interval: input not squarefree");
  // V(lo) - V(hi) counts roots in (lo, hi]; lo itself is added separately.
  int n = sign_changes(chain, lo) - sign_changes(chain, hi);
  if (reval(f, lo) == 0) ++n;
  return n;
}

int real_roots_in_interval(const IntPolynomial& f, const Rational& lo, const Rational& hi) {
  return real_roots_in_interval(to_rat(f), lo, hi);
}

std::vector<long double> real_roots(const IntPolynomial& f) {
  IntPolynomial s = squarefree_part(f);
  std::vector<long double> out;
  if (s.degree() < 1) return out;
  // Cauchy bound
  BigInt mx = 0;
  for (int i = 0; i < s.degree(); ++i) mx = std::max(mx, BigInt(abs(s.coeff(i))));
  Rational bound = Rational(mx) / Rational(abs(s.lc())) + 1;
  auto chain = sturm_chain(to_rat(s));
  RatPoly sp = to_rat(s);
  struct Iv {
    Rational lo, hi;
    int n;
  };
  std::vector<Iv> work{{-bound, bound, sign_changes(chain, -bound) - sign_changes(chain, bound)}};
  std::vector<std::pair<Rational, Rational>> isolated;
  while (!work.empty()) {
    Iv iv = work.back();
    work.pop_back();
    if (iv.n == 0) continue;
    if (iv.n == 1) {
      isolated.emplace_back(iv.lo, iv.hi);
      continue;
    }
    Rational mid = (iv.lo + iv.hi) / 2;
    int vm = sign_changes(chain, mid);
    int vlo = sign_changes(chain, iv.lo);
    work.push_back({iv.lo, mid, vlo - vm});
    work.push_back({mid, iv.hi, iv.n - (vlo - vm)});
  }
  for (auto& [lo, hi] : isolated) {
    // interval (lo, hi] holds exactly one root
    if (reval(sp, hi) == 0) {
      out.push_back(hi.convert_to<long double>());
      continue;
    }
    long double a = lo.convert_to<long double>(), b = hi.convert_to<long double>();
    long double fa = s.eval(a);
    for (int it = 0; it < 200 && b - a > 0; ++it) {
      long double m = (a + b) / 2;
      if (m <= a || m >= b) break;
      long double fm = s.eval(m);
      if ((fm < 0) == (fa < 0) && fm != 0) {
        a = m;
        fa = fm;
      } else {
        b = m;
      }
    }
    out.push_back((a + b) / 2);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ----------------------------------------------------------- ResiduePolynomial

ResiduePolynomial::ResiduePolynomial(int64_t modulus, std::vector<int64_t> coeffs)
    : m_(modulus), c_(std::move(coeffs)) {
  if (m_ < 1) fail(Errc::invalid_argument, "ResiduePolynomial: modulus < 1");
  for (auto& x : c_) x = mod(x, m_);
  trim();
}

ResiduePolynomial ResiduePolynomial::reduce(const IntPolynomial& f, int64_t modulus) {
  std::vector<int64_t> v;
  for (const auto& x : f.coeffs()) {
    BigInt r = x % modulus;
    if (r < 0) r += modulus;
    v.push_back(r.convert_to<int64_t>());
  }
  return ResiduePolynomial(modulus, std::move(v));
}

void ResiduePolynomial::trim() {
  while (!c_.empty() && c_.back() == 0) c_.pop_back();
}

std::string ResiduePolynomial::str() const {
  std::vector<BigInt> v(c_.begin(), c_.end());
  return IntPolynomial(v).str() + " mod " + std::to_string(m_);
}

// ------------------------------------------------------------------ F_l kernel

namespace fp {

void trim(Poly& a) {
  while (!a.empty() && a.back() == 0) a.pop_back();
}

Poly add(const Poly& a, const Poly& b, int64_t l) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] = (r[i] + b[i]) % l;
  trim(r);
  return r;
}

Poly sub(const Poly& a, const Poly& b, int64_t l) {
  Poly r(std::max(a.size(), b.size()), 0);
  for (size_t i = 0; i < a.size(); ++i) r[i] = a[i];
  for (size_t i = 0; i < b.size(); ++i) r[i] = mod(r[i] - b[i], l);
  trim(r);
  return r;
}

Poly mul(const Poly& a, const Poly& b, int64_t l) {
  if (a.empty() || b.empty()) return {};
  Poly r(a.size() + b.size() - 1, 0);
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0) continue;
    for (size_t j = 0; j < b.size(); ++j) r[i + j] = (r[i + j] + a[i] * b[j]) % l;
  }
  trim(r);
  return r;
}

void divmod(const Poly& a, const Poly& b, int64_t l, Poly& q, Poly& r) {
  if (b.empty()) fail(Errc::invalid_argument, "fp::divmod by zero");
  r = a;
  trim(r);
  int db = static_cast<int>(b.size()) - 1;
  int da = static_cast<int>(r.size()) - 1;
  q.assign(da >= db ? da - db + 1 : 0, 0);
  int64_t inv = invmod(b.back(), l);
  while (!r.empty() && static_cast<int>(r.size()) - 1 >= db) {
    int dr = static_cast<int>(r.size()) - 1;
    int64_t c = r.back() * inv % l;
    q[dr - db] = c;
    for (int i = 0; i <= db; ++i) r[dr - db + i] = mod(r[dr - db + i] - c * b[i], l);
    trim(r);
  }
  trim(q);
}

Poly rem(const Poly& a, const Poly& b, int64_t l) {
  Poly q, r;
  divmod(a, b, l, q, r);
  return r;
}

Poly mulmod(const Poly& a, const Poly& b, const Poly& f, int64_t l) { return rem(mul(a, b, l), f, l); }

Poly powmod(Poly a, BigInt e, const Poly& f, int64_t l) {
  Poly r{1};
  r = rem(r, f, l);
  a = rem(a, f, l);
  while (e > 0) {
    if ((e & 1) != 0) r = mulmod(r, a, f, l);
    a = mulmod(a, a, f, l);
    e >>= 1;
  }
  return r;
}

Poly monic(const Poly& a, int64_t l) {
  if (a.empty()) return a;
  int64_t inv = invmod(a.back(), l);
  Poly r = a;
  for (auto& x : r) x = x * inv % l;
  return r;
}

Poly gcd(Poly a, Poly b, int64_t l) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    Poly r = rem(a, b, l);
    a = std::move(b);
    b = std::move(r);
  }
  return monic(a, l);
}

Poly derivative(const Poly& a, int64_t l) {
  Poly d;
  for (size_t i = 1; i < a.size(); ++i) d.push_back(static_cast<int64_t>(i % l) * a[i] % l);
  trim(d);
  return d;
}

}  // namespace fp

std::vector<int> FactorMultiset::degrees() const {
  std::vector<int> d;
  for (const auto& [f, e] : factors)
    for (int i = 0; i < e; ++i) d.push_back(f.degree());
  std::sort(d.begin(), d.end());
  return d;
}

bool FactorMultiset::squarefree() const {
  for (const auto& fe : factors)
    if (fe.second > 1) return false;
  return true;
}

}  // namespace wl
