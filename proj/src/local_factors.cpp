#include "local_factors.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <tuple>

#include "class_count.hpp"
#include "count_cache.hpp"
#include "sato_tate.hpp"

namespace wl {

const char* to_string(FactorKind k) {
  switch (k) {
    case FactorKind::trace: return "trace";
    case FactorKind::charpoly: return "charpoly";
    case FactorKind::archimedean: return "archimedean";
    case FactorKind::zeta_ratio: return "zeta_ratio";
    case FactorKind::p_adic: return "p_adic";
  }
  return "?";
}

int SplittingProfile::a_K() const {
  auto get = [](const std::map<int, int>& m) {
    auto it = m.find(1);
    return it == m.end() ? 0 : it->second;
  };
  return get(e_K) - get(e_Kplus);
}

// ------------------------------------------------------------ v_inf

VInfRoutes v_inf_routes(const WeilSpec& s) {
  validate(s);
  if (!in_scaled_region(s)) fail(Errc::invalid_argument, "v_inf: not a Weil polynomial with real angles");
  int g = s.g;
  IntPolynomial f = assemble_f(s), fp = real_plus_poly(s);
  BigInt df = discriminant(f);
  if (df == 0) fail(Errc::degenerate_input, "v_inf: repeated Frobenius angle");
  BigInt dfp = discriminant(fp);
  VInfRoutes r;
  int e = g * (3 * g - 1) / 2;
  r.D_disc = Rational((g % 2) ? -df : df, dfp * pow(BigInt(s.p), e));
  auto roots = real_roots(fp);
  if (static_cast<int>(roots.size()) != g) fail(Errc::internal, "v_inf: root isolation lost a root");
  long double sp = std::sqrt(static_cast<long double>(s.p));
  std::vector<double> x;
  for (auto y : roots) x.push_back(static_cast<double>(y / sp));
  r.D_angles = weyl_discriminant(x);
  double d = static_cast<double>(r.D_disc);
  double rel = std::fabs(d - r.D_angles) / std::max(std::fabs(d), 1e-300);
  if (rel > 1e-9) fail(Errc::internal, "v_inf: angle and discriminant routes disagree");
  r.value = std::sqrt(std::fabs(d)) / std::pow(2 * std::numbers::pi, g);
  return r;
}

double v_inf(const WeilSpec& s) { return v_inf_routes(s).value; }

// ------------------------------------------------------------ normalizations

Rational trace_denominator(int g, int64_t l, int k) {
  BigInt lk = pow(BigInt(l), k);
  return Rational(group_order(g, l, k), lk * (lk - lk / l));
}

Rational charpoly_denominator(int g, int64_t l, int k) {
  BigInt lk = pow(BigInt(l), k);
  return Rational(group_order(g, l, k), pow(lk, g) * (lk - lk / l));
}

// ------------------------------------------------------------ trace factors

namespace {

std::mutex g_memo_mtx;

std::vector<Rational> to_ratios(const std::vector<BigInt>& counts, const Rational& den) {
  std::vector<Rational> v;
  v.reserve(counts.size());
  for (const auto& c : counts) v.push_back(Rational(c) / den);
  return v;
}

std::vector<BigInt> trace_counts_cached(int g, int64_t p, int64_t l, int k, uint64_t budget) {
  int64_t m = ipow(l, k);
  CacheKey key{"trace", g, mod(p, m), l, k};
  CountTable t;
  std::vector<BigInt> out(m, 0);
  if (cache_load(key, t)) {
    for (auto& [kv, c] : t.counts) out.at(kv.at(0)) = c;
    return out;
  }
  out = count_by_trace_table(g, p, l, k, budget);
  t.g = g;
  t.mult = key.mult;
  t.l = l;
  t.k = k;
  for (int64_t i = 0; i < m; ++i) {
    t.counts[{i}] = out[i];
    t.total += out[i];
  }
  cache_store(key, t);
  return out;
}

}  // namespace

const std::vector<Rational>& trace_factor_table(int g, int64_t p, int64_t l, int k, uint64_t budget) {
  static std::map<std::tuple<int, int64_t, int64_t, int>, std::vector<Rational>> memo;
  int64_t m = ipow(l, k);
  auto key = std::make_tuple(g, mod(p, m), l, k);
  {
    std::lock_guard<std::mutex> lk(g_memo_mtx);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }
  std::vector<Rational> v;
  if (mod(p, l) == 0) {
    v.assign(m, Rational(1));
  } else {
    v = to_ratios(trace_counts_cached(g, p, l, k, budget), trace_denominator(g, l, k));
  }
  std::lock_guard<std::mutex> lk(g_memo_mtx);
  return memo.emplace(key, std::move(v)).first->second;
}

const std::vector<Rational>& trace_factor_table_class(int g, int64_t p, int64_t l) {
  static std::map<std::tuple<int, int64_t, int64_t>, std::vector<Rational>> memo;
  auto key = std::make_tuple(g, mod(p, l), l);
  {
    std::lock_guard<std::mutex> lk(g_memo_mtx);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
  }
  auto v = to_ratios(class_trace_table(g, p, l), trace_denominator(g, l, 1));
  std::lock_guard<std::mutex> lk(g_memo_mtx);
  return memo.emplace(key, std::move(v)).first->second;
}

Rational v_l_trace(int g, int64_t p, int64_t l, int k, int64_t t, uint64_t budget) {
  if (!is_prime(l) || k < 1) fail(Errc::invalid_argument, "v_l_trace: need prime l and k >= 1");
  if (mod(p, l) == 0) return 1;
  int64_t m = ipow(l, k);
  if (g == 1) return Rational(count_trace_gl2(mod(p, m), l, k, mod(t, m))) / trace_denominator(1, l, k);
  return trace_factor_table(g, p, l, k, budget)[mod(t, m)];
}

// ------------------------------------------------------------ charpoly factors

Rational v_l_charpoly(const WeilSpec& s, int64_t l, int k, uint64_t budget) {
  if (!is_prime(l) || k < 1) fail(Errc::invalid_argument, "v_l_charpoly: need prime l and k >= 1");
  IntPolynomial f = assemble_f(s);
  int64_t m = ipow(l, k);
  ResiduePolynomial fr = ResiduePolynomial::reduce(f, m);
  if (mod(s.p, l) == 0) {
    if (s.g != 1) fail(Errc::resource_limit, "v_l_charpoly: l = p matrix count needs g = 1");
    return Rational(count_m_scheme_p(1, s.p, k, fr)) / charpoly_denominator(1, l, k);
  }
  if (s.g == 2 && k == 1 && l > 2) return Rational(class_count(2, s.p, l, fr)) / charpoly_denominator(2, l, 1);
  return Rational(count_by_charpoly(s.g, s.p, l, k, fr, budget)) / charpoly_denominator(s.g, l, k);
}

StableFactor v_l_charpoly_stable(const WeilSpec& s, int64_t l, int k_max, uint64_t budget) {
  StableFactor r;
  for (int k = 1; k <= k_max; ++k) r.history.push_back(v_l_charpoly(s, l, k, budget));
  r.k = k_max;
  r.value = r.history.back();
  int ks = k_max;
  while (ks > 1 && r.history[ks - 2] == r.value) --ks;
  r.k_star = ks;
  r.stabilized = ks < k_max;
  return r;
}

namespace {

std::vector<int> degree_profile(const IntPolynomial& f, int64_t l) {
  FactorMultiset fm = factor_mod_l(f, l);
  if (!fm.squarefree()) fail(Errc::invalid_argument, "degree profile: polynomial not squarefree mod l");
  return fm.degrees();
}

// Unit-root part of f mod p: f = x^g h(x) mod p for ordinary f.
IntPolynomial unit_root_part(const WeilSpec& s) {
  IntPolynomial f = assemble_f(s);
  std::vector<BigInt> c;
  for (int i = s.g; i <= 2 * s.g; ++i) c.push_back(f.coeff(i));
  return IntPolynomial(c);
}

Rational euler(const std::vector<int>& degs, int64_t l) {
  Rational r = 1;
  for (int d : degs) {
    BigInt q = pow(BigInt(l), d);
    r *= Rational(q, q - 1);
  }
  return r;
}

}  // namespace

SplittingProfile splitting_profile(const WeilSpec& s, int64_t l) {
  SplittingProfile sp;
  sp.l = l;
  if (mod(s.p, l) == 0) {
    if (s.a[s.g - 1] % s.p == 0) fail(Errc::invalid_argument, "splitting_profile: spec not ordinary at p");
    auto h = degree_profile(unit_root_part(s), l);
    sp.f_degrees = h;
    sp.f_degrees.insert(sp.f_degrees.end(), h.begin(), h.end());
    std::sort(sp.f_degrees.begin(), sp.f_degrees.end());
  } else {
    if (discriminant(assemble_f(s)) % l == 0) fail(Errc::invalid_argument, "splitting_profile: l divides disc(f)");
    sp.f_degrees = degree_profile(assemble_f(s), l);
  }
  sp.plus_degrees = degree_profile(real_plus_poly(s), l);
  for (int d : sp.f_degrees) sp.e_K[d] += 1;
  for (int d : sp.plus_degrees) sp.e_Kplus[d] += 1;
  return sp;
}

Rational zeta_ratio(const WeilSpec& s, int64_t l) {
  if (!is_prime(l)) fail(Errc::invalid_argument, "zeta_ratio: l must be prime");
  SplittingProfile sp = splitting_profile(s, l);
  return euler(sp.f_degrees, l) / euler(sp.plus_degrees, l);
}

SignedCycleType frobenius_cycle_type(const WeilSpec& s, int64_t l) {
  if (mod(s.p, l) == 0) fail(Errc::invalid_argument, "frobenius_cycle_type: l = p");
  if (discriminant(assemble_f(s)) % l == 0) fail(Errc::invalid_argument, "frobenius_cycle_type: l divides disc(f)");
  FactorMultiset fm = factor_mod_l(real_plus_poly(s), l);
  SignedCycleType out;
  int64_t pl = mod(s.p, l);
  for (auto& [Q, e] : fm.factors) {
    int d = Q.degree();
    // x^d Q(x + p/x) = sum_i q_i (x^2 + p)^i x^(d-i)
    fp::Poly R{0};
    fp::Poly xp{pl, 0, 1};
    for (int i = 0; i <= d; ++i) {
      fp::Poly term{Q.coeff(i)};
      for (int j = 0; j < i; ++j) term = fp::mul(term, xp, l);
      fp::Poly shift(d - i + 1, 0);
      shift[d - i] = 1;
      R = fp::add(R, fp::mul(term, shift, l), l);
    }
    FactorMultiset fr = factor_mod_l(ResiduePolynomial(l, R));
    int sign = fr.factors.size() == 2 ? 1 : -1;
    for (int i = 0; i < e; ++i) out.emplace_back(d, sign);
  }
  std::sort(out.begin(), out.end());
  return out;
}

Rational m_scheme_ratio(int64_t p, int k, int64_t t) {
  int64_t m = ipow(p, k);
  ResiduePolynomial f(m, {mod(p, m), mod(-t, m), 1});
  return Rational(count_m_scheme_p(1, p, k, f)) / charpoly_denominator(1, p, k);
}

VpResult v_p_charpoly(const WeilSpec& s, int k) {
  if (!is_ordinary_weil(s)) fail(Errc::invalid_argument, "v_p_charpoly: spec not ordinary");
  VpResult r;
  BigInt d = discriminant(assemble_f(s));
  r.hypothesis = valuation(d, s.p) == s.g * (s.g - 1);
  if (!r.hypothesis) {
    r.status = "hypothesis ord_p(disc) = g(g-1) fails; zeta value not asserted";
  }
  try {
    r.zeta = zeta_ratio(s, s.p);
  } catch (const Error& e) {
    if (r.hypothesis) throw;
    r.status += "; zeta profile unavailable";
  }
  if (s.g == 1 && ipow(s.p, k) <= 1000) {
    r.matrix = m_scheme_ratio(s.p, k, s.trace());
    if (r.status.empty()) r.status = (*r.matrix == r.zeta) ? "agree" : "disagree";
  } else if (r.status.empty()) {
    r.status = "matrix route skipped (budget)";
  }
  return r;
}

// ------------------------------------------------------------ products

namespace {

double to_double(const Rational& q) { return static_cast<double>(q); }

void finish(EulerProduct& e, int power) {
  e.product = e.base;
  double c = 0;
  for (const auto& f : e.factors) {
    e.product *= f.real;
    if (f.kind == FactorKind::p_adic || f.l == 2) continue;
    c = std::max(c, std::fabs(f.real - 1) * std::pow(static_cast<double>(f.l), power));
  }
  e.envelope_c = c;
  e.envelope_power = power;
  double l0 = static_cast<double>(e.l0);
  if (power >= 2) {
    // sum_{n > l0} c / n^2 <= c / l0
    e.tail_rel = c / l0;
    e.tail_rule = "c/l0 from sum over n > l0 of c/n^2";
  } else {
    // 1 + O(1/l) factors converge only with sign cancellation; square-root heuristic
    e.tail_rel = c / std::sqrt(l0);
    e.tail_rule = "c/sqrt(l0) cancellation heuristic";
    e.heuristic = true;
  }
}

LocalFactor make(FactorKind kind, int64_t l, int k, const Rational& v, std::string formula, bool stable = true) {
  LocalFactor f;
  f.kind = kind;
  f.l = l;
  f.k = k;
  f.value = v;
  f.real = to_double(v);
  f.formula = std::move(formula);
  f.stabilized = stable;
  return f;
}

}  // namespace

EulerProduct truncated_trace_product(int g, int64_t p, int64_t t, int64_t l0, const ProductPolicy& pol) {
  if (l0 < 2) fail(Errc::invalid_argument, "truncated_trace_product: l0 must be >= 2");
  EulerProduct e;
  e.l0 = l0;
  for (int64_t l : primes_up_to(l0)) {
    if (l == p) {
      if (pol.vp == PAdicConvention::m_scheme && g == 1) {
        int k = ipow(p, 2) <= 1000 ? 2 : 1;
        e.factors.push_back(make(FactorKind::p_adic, l, k, m_scheme_ratio(p, k, t), "m-scheme"));
      } else {
        e.factors.push_back(make(FactorKind::p_adic, l, 0, Rational(1), "convention v_p(t)=1"));
      }
      continue;
    }
    if (g == 1) {
      BigInt D = BigInt(t) * t - 4 * BigInt(p);
      int o = D == 0 ? 8 : valuation(D, l);
      int k = (o == 0 && l != 2) ? 1 : 2 * o + 2;
      int64_t m = ipow(l, k);
      Rational v = Rational(count_trace_gl2(mod(p, m), l, k, mod(t, m))) / trace_denominator(1, l, k);
      bool stable = true;
      if (k > 1 && m * l <= 2000000) {
        int64_t m1 = m * l;
        Rational v1 = Rational(count_trace_gl2(mod(p, m1), l, k + 1, mod(t, m1))) / trace_denominator(1, l, k + 1);
        stable = v1 == v;
      }
      e.factors.push_back(make(FactorKind::trace, l, k, v, "closed-gl2", stable));
      continue;
    }
    if (l < pol.class_from) {
      int k = pol.k_trace;
      e.factors.push_back(
          make(FactorKind::trace, l, k, trace_factor_table(g, p, l, k, pol.budget)[mod(t, ipow(l, k))], "lifting"));
    } else {
      e.factors.push_back(
          make(FactorKind::trace, l, 1, trace_factor_table_class(g, p, l)[mod(t, l)], "class-size", false));
    }
  }
  finish(e, g == 1 ? 1 : 2);
  return e;
}

EulerProduct truncated_charpoly_product(const WeilSpec& s, int64_t l0, const ProductPolicy& pol) {
  if (l0 < 2) fail(Errc::invalid_argument, "truncated_charpoly_product: l0 must be >= 2");
  EulerProduct e;
  e.l0 = l0;
  BigInt disc = discriminant(assemble_f(s));
  for (int64_t l : primes_up_to(l0)) {
    if (l == s.p) {
      VpResult r = v_p_charpoly(s, 2);
      if (!r.hypothesis) e.heuristic = true;
      e.factors.push_back(make(FactorKind::p_adic, l, 0, r.zeta, "zeta at p"));
      continue;
    }
    if (l != 2 && disc % l != 0) {
      e.factors.push_back(make(FactorKind::zeta_ratio, l, 1, zeta_ratio(s, l), "zeta ratio"));
      continue;
    }
    // ramified or l = 2: matrix counts
    if (s.g == 1) {
      int o = valuation(disc, l);
      StableFactor sf = v_l_charpoly_stable(s, l, 2 * o + 2, pol.budget);
      e.factors.push_back(make(FactorKind::charpoly, l, sf.k, sf.value, "matrix count", sf.stabilized));
    } else if (s.g == 2 && l <= 5) {
      e.factors.push_back(make(FactorKind::charpoly, l, 2, v_l_charpoly(s, l, 2, pol.budget), "matrix count", false));
    } else if (s.g == 2 && l > 2) {
      e.factors.push_back(make(FactorKind::charpoly, l, 1, v_l_charpoly(s, l, 1, pol.budget), "class-size", false));
      e.heuristic = true;
    } else {
      fail(Errc::resource_limit, "truncated_charpoly_product: no matrix route for this genus");
    }
  }
  finish(e, 1);
  return e;
}

MassPrediction predicted_ppav_mass(const WeilSpec& s, int64_t l0, const ProductPolicy& pol) {
  if (!is_ordinary_weil(s)) fail(Errc::invalid_argument, "predicted_ppav_mass: spec not ordinary");
  MassPrediction m;
  m.v_inf = v_inf(s);
  m.product = truncated_charpoly_product(s, l0, pol);
  IntPolynomial f = assemble_f(s);
  if (!is_irreducible_over_Z(f)) {
    m.heuristic = true;
  } else if (s.g >= 2 && galois_generic_test(s, 2000).verdict != GaloisVerdict::ProvedGeneric) {
    m.heuristic = true;
  }
  m.heuristic = m.heuristic || m.product.heuristic;
  m.value = std::pow(static_cast<double>(s.p), s.g * (s.g + 1) / 4.0) * m.v_inf * m.product.product;
  m.lower = m.value * (1 - m.product.tail_rel);
  m.upper = m.value * (1 + m.product.tail_rel);
  return m;
}

// ------------------------------------------------------------ hyperoctahedral group

std::vector<SigmaClass> a_sigma_table(int g) {
  if (g < 1 || g > 5) fail(Errc::invalid_argument, "a_sigma_table: g must be 1..5");
  std::map<SignedCycleType, SigmaClass> classes;
  std::vector<int> perm(g);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (int mask = 0; mask < (1 << g); ++mask) {
      // sigma maps the root (i, s) to (perm[i], s * eps_i)
      SignedCycleType type;
      std::vector<char> seen(g, 0);
      for (int i = 0; i < g; ++i) {
        if (seen[i]) continue;
        int len = 0, sign = 1, j = i;
        while (!seen[j]) {
          seen[j] = 1;
          if (mask >> j & 1) sign = -sign;
          j = perm[j];
          ++len;
        }
        type.emplace_back(len, sign);
      }
      // fixed cosets of H (roots) minus fixed cosets of H+ (pairs of roots)
      int a = 0;
      for (int i = 0; i < g; ++i) {
        if (perm[i] != i) continue;
        a += (mask >> i & 1) ? 0 : 2;
        a -= 1;
      }
      std::sort(type.begin(), type.end());
      auto& c = classes[type];
      c.type = type;
      c.size += 1;
      c.a = a;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  std::vector<SigmaClass> out;
  for (auto& [t, c] : classes) out.push_back(c);
  return out;
}

int a_sigma_of(const std::vector<SigmaClass>& table, const SignedCycleType& type) {
  for (const auto& c : table)
    if (c.type == type) return c.a;
  fail(Errc::invalid_argument, "a_sigma_of: cycle type not in the group");
}

}  // namespace wl
