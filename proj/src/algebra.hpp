#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wl {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

enum class Errc {
  invalid_argument = 1,
  degenerate_input,
  resource_limit,
  unsupported,
  needs_more_slack,
  ill_conditioned,
  io,
  internal,
  unknown_experiment,
};

class Error : public std::runtime_error {
 public:
  Error(Errc c, const std::string& what) : std::runtime_error(what), code_(c) {}
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void fail(Errc c, const std::string& what);

// Integer helpers on machine words.
int64_t mod(int64_t a, int64_t m);
int64_t powmod(int64_t b, int64_t e, int64_t m);
int64_t invmod(int64_t a, int64_t m);
int64_t ipow(int64_t b, int e);
bool is_prime(int64_t n);
std::vector<int64_t> primes_up_to(int64_t n);
int valuation(const BigInt& n, int64_t l);
int valuation(int64_t n, int64_t l);
int legendre(int64_t a, int64_t p);
BigInt isqrt(const BigInt& n);
std::string to_string(const Rational& q);

// Dense polynomial over Z, lowest degree first, no trailing zeros.
class IntPolynomial {
 public:
  IntPolynomial() = default;
  explicit IntPolynomial(std::vector<BigInt> coeffs);
  static IntPolynomial from(std::initializer_list<int64_t> coeffs);
  static IntPolynomial monomial(const BigInt& c, int deg);

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<BigInt>& coeffs() const { return c_; }
  BigInt coeff(int i) const;
  const BigInt& lc() const;
  BigInt content() const;

  IntPolynomial derivative() const;
  IntPolynomial primitive_part() const;
  BigInt eval(const BigInt& x) const;
  Rational eval(const Rational& x) const;
  long double eval(long double x) const;
  // p(x) -> p(c x)
  IntPolynomial scale_arg(const BigInt& c) const;

  friend IntPolynomial operator+(const IntPolynomial& a, const IntPolynomial& b);
  friend IntPolynomial operator-(const IntPolynomial& a, const IntPolynomial& b);
  friend IntPolynomial operator*(const IntPolynomial& a, const IntPolynomial& b);
  friend IntPolynomial operator*(const BigInt& s, const IntPolynomial& a);
  friend bool operator==(const IntPolynomial& a, const IntPolynomial& b) { return a.c_ == b.c_; }

  std::string str() const;

 private:
  void trim();
  std::vector<BigInt> c_;
};

// Exact division a / b over Z; throws internal if not exact.
IntPolynomial exact_div(const IntPolynomial& a, const IntPolynomial& b);
// lc(b)^(deg a - deg b + 1) * a  mod b
IntPolynomial pseudo_rem(const IntPolynomial& a, const IntPolynomial& b);
IntPolynomial gcd(const IntPolynomial& a, const IntPolynomial& b);
IntPolynomial squarefree_part(const IntPolynomial& f);

BigInt resultant(const IntPolynomial& f, const IntPolynomial& g);
BigInt discriminant(const IntPolynomial& f);

// Polynomials with rational coefficients, used for Sturm chains.
using RatPoly = std::vector<Rational>;
RatPoly to_rat(const IntPolynomial& f);

// Distinct real roots of squarefree f in the closed interval [lo, hi].
int real_roots_in_interval(const IntPolynomial& f, const Rational& lo, const Rational& hi);
// Same, over a rational polynomial (caller guarantees squarefree).
int real_roots_in_interval(const RatPoly& f, const Rational& lo, const Rational& hi);
// Real roots of f (any multiplicity), isolated by Sturm and refined by bisection.
std::vector<long double> real_roots(const IntPolynomial& f);

// Polynomial over Z/m, lowest degree first.
class ResiduePolynomial {
 public:
  ResiduePolynomial() = default;
  ResiduePolynomial(int64_t modulus, std::vector<int64_t> coeffs);
  static ResiduePolynomial reduce(const IntPolynomial& f, int64_t modulus);

  int64_t modulus() const { return m_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<int64_t>& coeffs() const { return c_; }
  int64_t coeff(int i) const { return i < static_cast<int>(c_.size()) ? c_[i] : 0; }
  int64_t lc() const { return c_.back(); }

  friend bool operator==(const ResiduePolynomial& a, const ResiduePolynomial& b) {
    return a.m_ == b.m_ && a.c_ == b.c_;
  }
  friend bool operator<(const ResiduePolynomial& a, const ResiduePolynomial& b) {
    if (a.c_.size() != b.c_.size()) return a.c_.size() < b.c_.size();
    return a.c_ < b.c_;
  }
  std::string str() const;

 private:
  void trim();
  int64_t m_ = 1;
  std::vector<int64_t> c_;
};

// Arithmetic over the prime field F_l (modulus must be prime for div/gcd).
namespace fp {
using Poly = std::vector<int64_t>;
void trim(Poly& a);
Poly add(const Poly& a, const Poly& b, int64_t l);
Poly sub(const Poly& a, const Poly& b, int64_t l);
Poly mul(const Poly& a, const Poly& b, int64_t l);
Poly mulmod(const Poly& a, const Poly& b, const Poly& f, int64_t l);
Poly powmod(Poly a, BigInt e, const Poly& f, int64_t l);
void divmod(const Poly& a, const Poly& b, int64_t l, Poly& q, Poly& r);
Poly rem(const Poly& a, const Poly& b, int64_t l);
Poly gcd(Poly a, Poly b, int64_t l);
Poly monic(const Poly& a, int64_t l);
Poly derivative(const Poly& a, int64_t l);
}  // namespace fp

struct FactorMultiset {
  int64_t l = 0;
  std::vector<std::pair<ResiduePolynomial, int>> factors;  // monic irreducible, multiplicity
  std::vector<int> degrees() const;  // with multiplicity, sorted
  bool squarefree() const;
};

constexpr uint64_t kDefaultFactorSeed = 0x5eed5eedULL;

FactorMultiset factor_mod_l(const IntPolynomial& f, int64_t l, uint64_t seed = kDefaultFactorSeed);
FactorMultiset factor_mod_l(const ResiduePolynomial& f, uint64_t seed = kDefaultFactorSeed);
bool is_irreducible_over_Z(const IntPolynomial& f);

}  // namespace wl
