#include "symplectic.hpp"

#include <algorithm>
#include <cstdlib>
#include <mutex>
#include <thread>

namespace wl {

// ------------------------------------------------------------ matrix basics

int64_t ResidueMatrix::trace() const {
  int64_t t = 0;
  for (int i = 0; i < n(); ++i) t += at(i, i);
  return mod(t, m);
}

namespace {

// (A Omega)_{ij}
inline int64_t a_omega(const ResidueMatrix& A, int i, int j) {
  int g = A.g;
  return j < g ? -A.at(i, j + g) : A.at(i, j - g);
}

inline int64_t omega(int g, int i, int j) {
  if (j == i + g && i < g) return 1;
  if (i == j + g && j < g) return -1;
  return 0;
}

// A Omega A^T over the integers (entries of A already reduced).
std::array<int64_t, kMaxN * kMaxN> aoat(const ResidueMatrix& A) {
  std::array<int64_t, kMaxN * kMaxN> r{};
  int n = A.n();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      int64_t s = 0;
      for (int k = 0; k < n; ++k) s += a_omega(A, i, k) * A.at(j, k);
      r[i * kMaxN + j] = s;
    }
  return r;
}

}  // namespace

int64_t ResidueMatrix::multiplier() const {
  auto P = aoat(*this);
  int64_t mu = mod(P[0 * kMaxN + g], m);
  for (int i = 0; i < n(); ++i)
    for (int j = 0; j < n(); ++j)
      if (mod(P[i * kMaxN + j] - mu * omega(g, i, j), m) != 0) return -1;
  return mu;
}

// Berkowitz: division-free characteristic polynomial, valid over any Z/m.
std::vector<int64_t> ResidueMatrix::charpoly() const {
  int N = n();
  std::vector<int64_t> c{1, mod(-at(0, 0), m)};  // highest degree first
  for (int r = 1; r < N; ++r) {
    std::vector<int64_t> t(r + 2);
    t[0] = 1;
    t[1] = mod(-at(r, r), m);
    std::vector<int64_t> vec(r);
    for (int i = 0; i < r; ++i) vec[i] = at(i, r);
    for (int i = 2; i <= r + 1; ++i) {
      int64_t s = 0;
      for (int q = 0; q < r; ++q) s = (s + at(r, q) * vec[q]) % m;
      t[i] = mod(-s, m);
      std::vector<int64_t> nv(r, 0);
      for (int a = 0; a < r; ++a) {
        int64_t acc = 0;
        for (int b = 0; b < r; ++b) acc = (acc + at(a, b) * vec[b]) % m;
        nv[a] = acc;
      }
      vec = std::move(nv);
    }
    std::vector<int64_t> nc(r + 2, 0);
    for (int i = 0; i < r + 2; ++i) {
      int64_t s = 0;
      for (int j = 0; j <= std::min(i, r); ++j) s = (s + t[i - j] * c[j]) % m;
      nc[i] = s;
    }
    c = std::move(nc);
  }
  std::reverse(c.begin(), c.end());
  return c;
}

ResidueMatrix ResidueMatrix::operator*(const ResidueMatrix& o) const {
  ResidueMatrix r;
  r.g = g;
  r.m = m;
  int N = n();
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) {
      int64_t s = 0;
      for (int k = 0; k < N; ++k) s = (s + at(i, k) * o.at(k, j)) % m;
      r.at(i, j) = s;
    }
  return r;
}

int tangent_dim(int g) { return 2 * g * g + g; }

std::vector<ResidueMatrix> tangent_basis(int g, int64_t l) {
  int N = 2 * g;
  std::vector<ResidueMatrix> out;
  for (int a = 0; a < N; ++a)
    for (int b = a; b < N; ++b) {
      // S = E_ab + E_ba (or E_aa); v = Omega S
      ResidueMatrix S;
      S.g = g;
      S.m = l;
      S.at(a, b) = 1;
      S.at(b, a) = 1;
      ResidueMatrix v;
      v.g = g;
      v.m = l;
      for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) {
          int64_t s = 0;
          for (int k = 0; k < N; ++k) s += omega(g, i, k) * S.at(k, j);
          v.at(i, j) = mod(s, l);
        }
      out.push_back(v);
    }
  return out;
}

TangentVector tangent_blocks(const ResidueMatrix& v) {
  TangentVector t;
  t.g = v.g;
  int g = v.g;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      t.A.push_back(v.at(i, j));
      t.B.push_back(v.at(i, j + g));
      t.C.push_back(v.at(i + g, j));
      t.D.push_back(v.at(i + g, j + g));
    }
  return t;
}

ResidueMatrix TangentVector::to_matrix(int64_t l) const {
  ResidueMatrix v;
  v.g = g;
  v.m = l;
  for (int i = 0; i < g; ++i)
    for (int j = 0; j < g; ++j) {
      v.at(i, j) = mod(A[i * g + j], l);
      v.at(i, j + g) = mod(B[i * g + j], l);
      v.at(i + g, j) = mod(C[i * g + j], l);
      v.at(i + g, j + g) = mod(D[i * g + j], l);
    }
  return v;
}

// ------------------------------------------------------------ group orders

BigInt sp_order(int g, int64_t l) {
  BigInt L = l;
  BigInt r = pow(L, g * g);
  for (int i = 1; i <= g; ++i) r *= pow(L, 2 * i) - 1;
  return r;
}

BigInt group_order(int g, int64_t l, int k) {
  if (g < 1 || g > 3) fail(Errc::invalid_argument, "group_order: g must be 1..3");
  if (k < 1 || !is_prime(l)) fail(Errc::invalid_argument, "group_order: need prime l and k >= 1");
  int dim = 2 * g * g + g + 1;
  return BigInt(l - 1) * sp_order(g, l) * pow(BigInt(l), (k - 1) * dim);
}

BigInt fixed_mult_order(int g, int64_t l, int k) {
  return sp_order(g, l) * pow(BigInt(l), (k - 1) * tangent_dim(g));
}

int thread_count() {
  if (const char* s = std::getenv("WEILLAB_THREADS")) {
    int n = std::atoi(s);
    if (n >= 1) return n;
  }
  unsigned h = std::thread::hardware_concurrency();
  return h == 0 ? 1 : static_cast<int>(h);
}

// ------------------------------------------------------------ enumeration

namespace {

struct BudgetExceeded {};

// Enumerate GSp_{2g,mu}(F_l) for e1 indices in [first, last) stepping by stride.
// V is called with a compact row-major n x n array.
template <class V>
uint64_t enum_gsp(int g, int64_t l, int64_t mu, int64_t first, int64_t stride, V&& visit,
                  uint64_t budget) {
  uint64_t visited = 0;
  const int N = 2 * g;
  int64_t total_vec = ipow(l, N);
  std::vector<int64_t> inv(l, 0);
  for (int64_t x = 1; x < l; ++x) inv[x] = invmod(x, l);
  auto om = [&](const int64_t* x, const int64_t* y) {
    int64_t s = 0;
    for (int i = 0; i < g; ++i) s += x[i] * y[i + g] - x[i + g] * y[i];
    return mod(s, l);
  };
  int64_t A[16];
  int64_t e1[4], f1[4], w[4], w2[4], u[4], v[4], e2[4], f2[4];
  for (int64_t idx = first + 1; idx < total_vec; idx += stride) {
    int64_t x = idx;
    for (int i = 0; i < N; ++i) {
      e1[i] = x % l;
      x /= l;
    }
    // w . y = omega(e1, y)
    for (int i = 0; i < g; ++i) {
      w[i] = mod(-e1[i + g], l);
      w[i + g] = e1[i];
    }
    int q = 0;
    while (w[q] == 0) ++q;
    int64_t wqinv = inv[w[q]];
    int64_t nfree = ipow(l, N - 1);
    for (int64_t fi = 0; fi < nfree; ++fi) {
      int64_t y = fi, s = 0;
      for (int i = 0; i < N; ++i) {
        if (i == q) continue;
        f1[i] = y % l;
        y /= l;
        s += w[i] * f1[i];
      }
      f1[q] = mod((mu - s) % l * wqinv, l);
      if (g == 1) {
        A[0] = e1[0];
        A[1] = f1[0];
        A[2] = e1[1];
        A[3] = f1[1];
        if (++visited > budget) throw BudgetExceeded{};
        visit(A);
        continue;
      }
      // W = {y : omega(e1,y) = omega(f1,y) = 0}; g = 2 here
      for (int i = 0; i < g; ++i) {
        w2[i] = mod(-f1[i + g], l);
        w2[i + g] = f1[i];
      }
      // row-reduce the 2 x 4 system [w; w2]
      int64_t r1[4], r2[4];
      for (int i = 0; i < 4; ++i) {
        r1[i] = w[i] * wqinv % l;
        r2[i] = w2[i];
      }
      int64_t c2 = r2[q];
      for (int i = 0; i < 4; ++i) r2[i] = mod(r2[i] - c2 * r1[i], l);
      int q2 = 0;
      while (r2[q2] == 0) ++q2;
      int64_t i2 = inv[r2[q2]];
      for (int i = 0; i < 4; ++i) r2[i] = r2[i] * i2 % l;
      int64_t c1 = r1[q2];
      for (int i = 0; i < 4; ++i) r1[i] = mod(r1[i] - c1 * r2[i], l);
      int fr[2], nf = 0;
      for (int i = 0; i < 4; ++i)
        if (i != q && i != q2) fr[nf++] = i;
      for (int i = 0; i < 4; ++i) u[i] = v[i] = 0;
      u[fr[0]] = 1;
      u[q] = mod(-r1[fr[0]], l);
      u[q2] = mod(-r2[fr[0]], l);
      v[fr[1]] = 1;
      v[q] = mod(-r1[fr[1]], l);
      v[q2] = mod(-r2[fr[1]], l);
      int64_t c = om(u, v);
      int64_t target = mu * inv[c] % l;  // alpha*delta - beta*gamma = mu / c
      for (int i = 0; i < 4; ++i) {
        A[i * 4 + 0] = e1[i];
        A[i * 4 + 2] = f1[i];
      }
      for (int64_t al = 0; al < l; ++al)
        for (int64_t be = 0; be < l; ++be) {
          if (al == 0 && be == 0) continue;
          for (int i = 0; i < 4; ++i) {
            e2[i] = (al * u[i] + be * v[i]) % l;
            A[i * 4 + 1] = e2[i];
          }
          for (int64_t fr2 = 0; fr2 < l; ++fr2) {
            int64_t ga, de;
            if (al != 0) {
              ga = fr2;
              de = (target + be * ga) % l * inv[al] % l;
            } else {
              de = fr2;
              ga = mod(-target * inv[be], l);
            }
            for (int i = 0; i < 4; ++i) {
              f2[i] = (ga * u[i] + de * v[i]) % l;
              A[i * 4 + 3] = f2[i];
            }
            if (++visited > budget) throw BudgetExceeded{};
            visit(A);
          }
        }
    }
  }
  return visited;
}

template <class V>
uint64_t enum_all_mults(int g, int64_t l, int64_t mu, int64_t first, int64_t stride, V&& visit,
                        uint64_t budget) {
  if (mu >= 0) return enum_gsp(g, l, mod(mu, l), first, stride, visit, budget);
  uint64_t n = 0;
  for (int64_t m = 1; m < l; ++m) n += enum_gsp(g, l, m, first, stride, visit, budget - n);
  return n;
}

// Run enumeration over threads; each thread owns a State built by make().
template <class State, class Make, class Visit>
std::vector<State> parallel_enum(int g, int64_t l, int64_t mu, Make make, Visit visit, uint64_t budget,
                                 uint64_t* visited_out = nullptr) {
  if (g < 1 || g > 2) fail(Errc::unsupported, "enumeration supports g in {1,2}");
  if (!is_prime(l)) fail(Errc::invalid_argument, "enumeration: l must be prime");
  if (mu >= 0 && mod(mu, l) == 0) fail(Errc::invalid_argument, "enumeration: multiplier must be a unit mod l");
  BigInt expected = mu >= 0 ? sp_order(g, l) : sp_order(g, l) * (l - 1);
  if (expected > budget) fail(Errc::resource_limit, "enumeration exceeds state budget");
  int T = std::max(1, thread_count());
  std::vector<State> states;
  for (int i = 0; i < T; ++i) states.push_back(make());
  std::vector<uint64_t> counts(T, 0);
  std::vector<std::thread> th;
  bool exceeded = false;
  std::mutex mtx;
  for (int i = 0; i < T; ++i) {
    th.emplace_back([&, i] {
      try {
        counts[i] = enum_all_mults(
            g, l, mu, i, T, [&](const int64_t* A) { visit(states[i], A); }, budget);
      } catch (const BudgetExceeded&) {
        std::lock_guard<std::mutex> lk(mtx);
        exceeded = true;
      }
    });
  }
  for (auto& t : th) t.join();
  if (exceeded) fail(Errc::resource_limit, "enumeration exceeded state budget");
  if (visited_out) {
    uint64_t s = 0;
    for (auto c : counts) s += c;
    *visited_out = s;
  }
  return states;
}

ResidueMatrix from_compact(int g, int64_t m, const int64_t* A) {
  ResidueMatrix M;
  M.g = g;
  M.m = m;
  int N = 2 * g;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) M.at(i, j) = A[i * N + j];
  return M;
}

inline bool compact_singular(int g, int64_t l, const int64_t* A) {
  const int N = 2 * g;
  auto ao = [&](int i, int j) { return j < g ? -A[i * N + j + g] : A[i * N + j - g]; };
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j)
      if (mod(ao(i, j) + ao(j, i), l) != 0) return false;
  return true;
}

}  // namespace

uint64_t enumerate_gsp_mod_l(int g, int64_t l, int64_t mu, const RawVisitor& visit, uint64_t budget) {
  if (g < 1 || g > 2) fail(Errc::unsupported, "enumerate_gsp_mod_l: g must be 1 or 2");
  if (!is_prime(l)) fail(Errc::invalid_argument, "enumerate_gsp_mod_l: l must be prime");
  if (mu >= 0 && mod(mu, l) == 0) fail(Errc::invalid_argument, "enumerate_gsp_mod_l: multiplier not a unit");
  try {
    return enum_all_mults(g, l, mu, 0, 1, visit, budget);
  } catch (const BudgetExceeded&) {
    fail(Errc::resource_limit, "enumerate_gsp_mod_l: budget exceeded");
  }
}

// ------------------------------------------------------------ lifting

ResidueMatrix canonical_lift(const ResidueMatrix& gamma, int64_t l, int j, int64_t mu) {
  int64_t lj = ipow(l, j), lj1 = lj * l;
  int g = gamma.g, N = gamma.n();
  ResidueMatrix G = gamma;
  G.m = lj1;
  auto P = aoat(G);
  // E = (G Omega G^T - mu Omega) / l^j mod l
  int64_t E[kMaxN][kMaxN];
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) {
      int64_t d = P[i * kMaxN + k] - mu * omega(g, i, k);
      if (mod(d, lj) != 0) fail(Errc::internal, "canonical_lift: input multiplier is wrong");
      E[i][k] = mod(d / lj, l);
    }
  int64_t muinv = invmod(mod(mu, l), l);
  // X = -(strict upper part of E); Delta = X mu^{-1} Omega^{-1} gamma, Omega^{-1} = -Omega
  int64_t OmG[kMaxN][kMaxN];
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) {
      int64_t s = 0;
      for (int q = 0; q < N; ++q) s -= omega(g, i, q) * gamma.at(q, k);
      OmG[i][k] = mod(s, l);
    }
  for (int i = 0; i < N; ++i)
    for (int k = 0; k < N; ++k) {
      int64_t s = 0;
      for (int q = i + 1; q < N; ++q) s -= E[i][q] * OmG[q][k];
      int64_t delta = mod(s % l * muinv, l);
      G.at(i, k) = mod(gamma.at(i, k) + lj * delta, lj1);
    }
  return G;
}

namespace {

// Solve M x = b over F_l (rows x cols). Returns rank, or -1 if inconsistent.
// On success fills a particular solution and a kernel basis.
int solve_mod_l(std::vector<std::vector<int64_t>> M, std::vector<int64_t> b, int cols, int64_t l,
                std::vector<int64_t>* particular, std::vector<std::vector<int64_t>>* kernel) {
  int rows = static_cast<int>(M.size());
  std::vector<int> pivcol;
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int piv = -1;
    for (int i = r; i < rows; ++i)
      if (M[i][c] % l != 0) {
        piv = i;
        break;
      }
    if (piv < 0) continue;
    std::swap(M[piv], M[r]);
    std::swap(b[piv], b[r]);
    int64_t inv = invmod(M[r][c], l);
    for (auto& x : M[r]) x = x * inv % l;
    b[r] = b[r] * inv % l;
    for (int i = 0; i < rows; ++i) {
      if (i == r || M[i][c] == 0) continue;
      int64_t f = M[i][c];
      for (int k = 0; k < cols; ++k) M[i][k] = mod(M[i][k] - f * M[r][k], l);
      b[i] = mod(b[i] - f * b[r], l);
    }
    pivcol.push_back(c);
    ++r;
  }
  for (int i = r; i < rows; ++i)
    if (mod(b[i], l) != 0) return -1;
  if (particular) {
    particular->assign(cols, 0);
    for (int i = 0; i < r; ++i) (*particular)[pivcol[i]] = b[i];
  }
  if (kernel) {
    kernel->clear();
    std::vector<char> isp(cols, 0);
    for (int c : pivcol) isp[c] = 1;
    for (int fcol = 0; fcol < cols; ++fcol) {
      if (isp[fcol]) continue;
      std::vector<int64_t> v(cols, 0);
      v[fcol] = 1;
      for (int i = 0; i < r; ++i) v[pivcol[i]] = mod(-M[i][fcol], l);
      kernel->push_back(v);
    }
  }
  return r;
}

struct LinearSystem {
  std::vector<std::vector<int64_t>> M;
  std::vector<int64_t> b;
  bool trivially_empty = false;
};

// Constraint system on x in F_l^dim for lifts gt + l^j (gamma v(x)).
LinearSystem build_system(const ResidueMatrix& gamma, const ResidueMatrix& gt,
                          const std::vector<ResidueMatrix>& basis, int64_t l, int j,
                          const LiftRequest& req) {
  LinearSystem S;
  int64_t lj = ipow(l, j), lj1 = lj * l;
  int dim = static_cast<int>(basis.size());
  ResidueMatrix gl = gamma;
  gl.m = l;
  for (auto& x : gl.e) x = mod(x, l);
  if (req.target == LiftTarget::trace) {
    int64_t d = mod(req.trace - gt.trace(), lj1);
    if (d % lj != 0) {
      S.trivially_empty = true;
      return S;
    }
    std::vector<int64_t> row(dim);
    for (int b = 0; b < dim; ++b) row[b] = (gl * basis[b]).trace();
    S.M.push_back(row);
    S.b.push_back(d / lj);
  } else if (req.target == LiftTarget::charpoly) {
    int g = gamma.g;
    auto c0 = gt.charpoly();
    // coefficient of x^{2g-i} for i = 1..g
    for (int i = 1; i <= g; ++i) {
      int64_t d = mod(req.charpoly.at(2 * g - i) - c0[2 * g - i], lj1);
      if (d % lj != 0) {
        S.trivially_empty = true;
        return S;
      }
      S.b.push_back(d / lj);
    }
    S.M.assign(g, std::vector<int64_t>(dim));
    for (int b = 0; b < dim; ++b) {
      ResidueMatrix Y = gl * basis[b];
      ResidueMatrix H = gt;
      for (int a = 0; a < gt.n(); ++a)
        for (int c = 0; c < gt.n(); ++c) H.at(a, c) = mod(gt.at(a, c) + lj * Y.at(a, c), lj1);
      auto c1 = H.charpoly();
      for (int i = 1; i <= g; ++i) S.M[i - 1][b] = mod(c1[2 * g - i] - c0[2 * g - i], lj1) / lj;
    }
  }
  return S;
}

ResidueMatrix apply_tangent(const ResidueMatrix& gamma, const ResidueMatrix& gt,
                            const std::vector<ResidueMatrix>& basis, const std::vector<int64_t>& x,
                            int64_t l, int j) {
  int64_t lj = ipow(l, j), lj1 = lj * l;
  ResidueMatrix v;
  v.g = gamma.g;
  v.m = l;
  for (size_t b = 0; b < basis.size(); ++b) {
    if (x[b] == 0) continue;
    for (int a = 0; a < v.n(); ++a)
      for (int c = 0; c < v.n(); ++c) v.at(a, c) = (v.at(a, c) + x[b] * basis[b].at(a, c)) % l;
  }
  ResidueMatrix gl = gamma;
  gl.m = l;
  for (auto& e : gl.e) e = mod(e, l);
  ResidueMatrix Y = gl * v;
  ResidueMatrix out = gt;
  for (int a = 0; a < out.n(); ++a)
    for (int c = 0; c < out.n(); ++c) out.at(a, c) = mod(gt.at(a, c) + lj * Y.at(a, c), lj1);
  return out;
}

}  // namespace

std::vector<ResidueMatrix> lift_layer(const ResidueMatrix& gamma, int64_t l, int j, int64_t mu,
                                      const LiftRequest& req) {
  if (j < 1) fail(Errc::invalid_argument, "lift_layer: j must be >= 1");
  ResidueMatrix gt = canonical_lift(gamma, l, j, mu);
  auto basis = tangent_basis(gamma.g, l);
  int dim = static_cast<int>(basis.size());
  LinearSystem S = build_system(gamma, gt, basis, l, j, req);
  std::vector<ResidueMatrix> out;
  if (S.trivially_empty) return out;
  std::vector<int64_t> part(dim, 0);
  std::vector<std::vector<int64_t>> ker;
  if (S.M.empty()) {
    for (int b = 0; b < dim; ++b) {
      std::vector<int64_t> e(dim, 0);
      e[b] = 1;
      ker.push_back(e);
    }
  } else if (solve_mod_l(S.M, S.b, dim, l, &part, &ker) < 0) {
    return out;
  }
  int kd = static_cast<int>(ker.size());
  int64_t combos = ipow(l, kd);
  std::vector<int64_t> x(dim);
  for (int64_t c = 0; c < combos; ++c) {
    x = part;
    int64_t y = c;
    for (int q = 0; q < kd; ++q) {
      int64_t coef = y % l;
      y /= l;
      if (coef == 0) continue;
      for (int b = 0; b < dim; ++b) x[b] = (x[b] + coef * ker[q][b]) % l;
    }
    out.push_back(apply_tangent(gamma, gt, basis, x, l, j));
  }
  return out;
}

BigInt lift_count(const ResidueMatrix& gamma, int64_t l, int j, int64_t mu, const LiftRequest& req) {
  ResidueMatrix gt = canonical_lift(gamma, l, j, mu);
  auto basis = tangent_basis(gamma.g, l);
  int dim = static_cast<int>(basis.size());
  LinearSystem S = build_system(gamma, gt, basis, l, j, req);
  if (S.trivially_empty) return 0;
  if (S.M.empty()) return pow(BigInt(l), dim);
  int r = solve_mod_l(S.M, S.b, dim, l, nullptr, nullptr);
  if (r < 0) return 0;
  return pow(BigInt(l), dim - r);
}

// ------------------------------------------------------------ g = 1 closed route

BigInt count_product_solutions(int64_t r, int64_t l, int k) {
  int64_t m = ipow(l, k);
  r = mod(r, m);
  if (r == 0) return BigInt(m) * k * (l - 1) / l + m;
  int v = valuation(r, l);
  return BigInt(v + 1) * (m / l) * (l - 1);
}

BigInt count_trace_gl2(int64_t mu, int64_t l, int k, int64_t t) {
  int64_t m = ipow(l, k);
  BigInt s = 0;
  for (int64_t a = 0; a < m; ++a) s += count_product_solutions(mod(a * mod(t - a, m) - mu, m), l, k);
  return s;
}

// ------------------------------------------------------------ trace tables

std::vector<BigInt> count_by_trace_table(int g, int64_t p, int64_t l, int k, uint64_t budget) {
  if (!is_prime(l) || k < 1) fail(Errc::invalid_argument, "count_by_trace: need prime l, k >= 1");
  if (mod(p, l) == 0) fail(Errc::invalid_argument, "count_by_trace: l = p needs the M-scheme count");
  int64_t m = ipow(l, k);
  std::vector<BigInt> N(m, 0);
  if (g == 1) {
    if (static_cast<uint64_t>(m) * static_cast<uint64_t>(m) > budget)
      fail(Errc::resource_limit, "count_by_trace: budget");
    for (int64_t t = 0; t < m; ++t) N[t] = count_trace_gl2(p, l, k, t);
    return N;
  }
  if (g != 2) fail(Errc::unsupported, "count_by_trace: g must be 1 or 2");
  int dim = tangent_dim(g);
  int64_t mu = mod(p, m);
  struct State {
    std::vector<uint64_t> hist;
    std::vector<std::array<int64_t, 16>> singular;
  };
  auto states = parallel_enum<State>(
      g, l, mu % l,
      [&] {
        State s;
        s.hist.assign(l, 0);
        return s;
      },
      [&](State& s, const int64_t* A) {
        if (compact_singular(g, l, A)) {
          std::array<int64_t, 16> a;
          std::copy(A, A + 16, a.begin());
          s.singular.push_back(a);
        } else {
          s.hist[(A[0] + A[5] + A[10] + A[15]) % l] += 1;
        }
      },
      budget);
  std::vector<uint64_t> hist(l, 0);
  std::vector<std::array<int64_t, 16>> singular;
  for (auto& s : states) {
    for (int64_t t = 0; t < l; ++t) hist[t] += s.hist[t];
    singular.insert(singular.end(), s.singular.begin(), s.singular.end());
  }
  BigInt spread = pow(BigInt(l), (dim - 1) * (k - 1));
  for (int64_t t = 0; t < m; ++t) N[t] += spread * hist[t % l];
  if (k == 1) {
    for (auto& a : singular) N[(a[0] + a[5] + a[10] + a[15]) % l] += 1;
    return N;
  }
  auto basis = tangent_basis(g, l);
  BigInt ldim = pow(BigInt(l), dim);
  uint64_t work = 0;
  // singular points keep all lifts in one trace class per layer
  std::function<void(const ResidueMatrix&, int)> proc = [&](const ResidueMatrix& G, int j) {
    ResidueMatrix gt = canonical_lift(G, l, j, mu);
    if (j + 1 == k) {
      N[gt.trace()] += ldim;
      return;
    }
    int64_t combos = ipow(l, dim);
    std::vector<int64_t> x(dim);
    for (int64_t c = 0; c < combos; ++c) {
      if (++work > budget) fail(Errc::resource_limit, "count_by_trace: lift budget exceeded");
      int64_t y = c;
      for (int b = 0; b < dim; ++b) {
        x[b] = y % l;
        y /= l;
      }
      proc(apply_tangent(G, gt, basis, x, l, j), j + 1);
    }
  };
  for (auto& a : singular) proc(from_compact(g, l, a.data()), 1);
  return N;
}

BigInt count_by_trace(int g, int64_t p, int64_t l, int k, int64_t t, uint64_t budget) {
  if (g == 1) {
    if (mod(p, l) == 0) fail(Errc::invalid_argument, "count_by_trace: l = p needs the M-scheme count");
    return count_trace_gl2(p, l, k, t);
  }
  auto N = count_by_trace_table(g, p, l, k, budget);
  return N[mod(t, ipow(l, k))];
}

// ------------------------------------------------------------ charpoly tables

CountTable charpoly_table(int g, int64_t p, int64_t l, int k, uint64_t budget) {
  if (mod(p, l) == 0) fail(Errc::invalid_argument, "charpoly_table: l = p needs the M-scheme count");
  if (k < 1 || k > 2) fail(Errc::unsupported, "charpoly_table: k must be 1 or 2");
  CountTable T;
  T.g = g;
  T.mult = p;
  T.l = l;
  T.k = k;
  int64_t m = ipow(l, k);
  int64_t mu = mod(p, m);
  int N = 2 * g;
  int dim = tangent_dim(g);
  using Key = std::vector<int64_t>;
  struct State {
    std::map<Key, uint64_t> hist;
    std::vector<uint64_t> dense;
    uint64_t lifted = 0;
  };
  std::vector<ResidueMatrix> basis = tangent_basis(g, l);
  auto states = parallel_enum<State>(
      g, l, mu % l,
      [&] {
        State s;
        if (k == 1) s.dense.assign(ipow(l, g), 0);
        return s;
      },
      [&](State& s, const int64_t* A) {
        if (k == 1) {
          // dense index a_1 + l a_2
          if (g == 2) {
            int64_t e1 = A[0] + A[5] + A[10] + A[15];
            int64_t e2 = 0;
            for (int i = 0; i < 4; ++i)
              for (int j = i + 1; j < 4; ++j) e2 += A[i * 4 + i] * A[j * 4 + j] - A[i * 4 + j] * A[j * 4 + i];
            s.dense[mod(-e1, l) + l * mod(e2, l)] += 1;
          } else {
            s.dense[mod(-(A[0] + A[3]), l)] += 1;
          }
          return;
        }
        ResidueMatrix G = from_compact(g, l, A);
        if (++s.lifted > budget) throw BudgetExceeded{};
        ResidueMatrix gt = canonical_lift(G, l, 1, mu);
        LiftRequest req;
        req.target = LiftTarget::charpoly;
        req.charpoly = gt.charpoly();
        LinearSystem S = build_system(G, gt, basis, l, 1, req);
        // image of the Jacobian: enumerate combinations of its columns
        std::vector<std::vector<int64_t>> cols;
        {
          std::vector<std::vector<int64_t>> Mt(dim, std::vector<int64_t>(g));
          for (int b = 0; b < dim; ++b)
            for (int i = 0; i < g; ++i) Mt[b][i] = S.M[i][b];
          // row-reduce Mt to get a basis of the column space
          int r = 0;
          for (int c = 0; c < g && r < dim; ++c) {
            int piv = -1;
            for (int i = r; i < dim; ++i)
              if (Mt[i][c] != 0) {
                piv = i;
                break;
              }
            if (piv < 0) continue;
            std::swap(Mt[piv], Mt[r]);
            int64_t inv = invmod(Mt[r][c], l);
            for (auto& x : Mt[r]) x = x * inv % l;
            for (int i = 0; i < dim; ++i) {
              if (i == r || Mt[i][c] == 0) continue;
              int64_t f = Mt[i][c];
              for (int q = 0; q < g; ++q) Mt[i][q] = mod(Mt[i][q] - f * Mt[r][q], l);
            }
            ++r;
          }
          for (int i = 0; i < r; ++i) cols.push_back(Mt[i]);
        }
        int rank = static_cast<int>(cols.size());
        uint64_t per = 1;
        for (int i = 0; i < dim - rank; ++i) per *= l;
        int64_t combos = ipow(l, rank);
        auto c0 = gt.charpoly();
        for (int64_t c = 0; c < combos; ++c) {
          std::vector<int64_t> w(g, 0);
          int64_t y = c;
          for (int q = 0; q < rank; ++q) {
            int64_t coef = y % l;
            y /= l;
            for (int i = 0; i < g; ++i) w[i] = (w[i] + coef * cols[q][i]) % l;
          }
          Key key(g);
          for (int i = 1; i <= g; ++i) key[i - 1] = mod(c0[2 * g - i] + l * w[i - 1], m);
          s.hist[key] += per;
        }
      },
      budget);
  std::map<Key, BigInt> merged;
  for (auto& s : states) {
    for (auto& [key, c] : s.hist) merged[key] += c;
    for (size_t i = 0; i < s.dense.size(); ++i) {
      if (s.dense[i] == 0) continue;
      Key key(g);
      int64_t y = static_cast<int64_t>(i);
      for (int q = 0; q < g; ++q) {
        key[q] = y % l;
        y /= l;
      }
      merged[key] += s.dense[i];
    }
  }
  // expand keys (a_1..a_g) into full monic residue charpolys
  for (auto& [key, c] : merged) {
    std::vector<int64_t> f(N + 1, 0);
    f[N] = 1;
    for (int i = 1; i <= g; ++i) f[N - i] = key[i - 1];
    for (int i = 1; i <= g; ++i) {
      int64_t ai = (g - i == 0) ? 1 : key[g - i - 1];
      f[g - i] = mod(powmod(mu, i, m) * ai, m);
    }
    T.counts[f] = c;
    T.total += c;
  }
  (void)N;
  return T;
}

BigInt count_by_charpoly(int g, int64_t p, int64_t l, int k, const ResiduePolynomial& f, uint64_t budget) {
  int64_t m = ipow(l, k);
  if (f.modulus() != m) fail(Errc::invalid_argument, "count_by_charpoly: modulus must be l^k");
  int N = 2 * g;
  if (f.degree() != N || f.lc() != 1) fail(Errc::invalid_argument, "count_by_charpoly: f must be monic of degree 2g");
  int64_t mu = mod(p, m);
  // multiplier symmetry: coefficient of x^{g-i} = mu^i * coefficient of x^{g+i}
  for (int i = 1; i <= g; ++i)
    if (mod(f.coeff(g - i) - powmod(mu, i, m) * f.coeff(g + i), m) != 0)
      fail(Errc::invalid_argument, "count_by_charpoly: f lacks the multiplier symmetry");
  if (mod(p, l) == 0) fail(Errc::invalid_argument, "count_by_charpoly: l = p needs the M-scheme count");
  if (g == 1) return count_trace_gl2(p, l, k, mod(-f.coeff(1), m));
  if (k <= 2) {
    CountTable T = charpoly_table(g, p, l, k, budget);
    std::vector<int64_t> key(f.coeffs().begin(), f.coeffs().end());
    auto it = T.counts.find(key);
    return it == T.counts.end() ? BigInt(0) : it->second;
  }
  // general k: filter mod l, then charpoly-constrained lifting
  std::vector<std::array<int64_t, 16>> seeds;
  enumerate_gsp_mod_l(
      g, l, mu % l,
      [&](const int64_t* A) {
        ResidueMatrix G = from_compact(g, l, A);
        auto c = G.charpoly();
        for (int i = 0; i <= N; ++i)
          if (c[i] != f.coeff(i) % l) return;
        std::array<int64_t, 16> a;
        std::copy(A, A + 16, a.begin());
        seeds.push_back(a);
      },
      budget);
  BigInt total = 0;
  uint64_t work = 0;
  std::function<void(const ResidueMatrix&, int)> proc = [&](const ResidueMatrix& G, int j) {
    if (++work > budget) fail(Errc::resource_limit, "count_by_charpoly: budget exceeded");
    LiftRequest req;
    req.target = LiftTarget::charpoly;
    int64_t mj1 = ipow(l, j + 1);
    for (int i = 0; i <= N; ++i) req.charpoly.push_back(f.coeff(i) % mj1);
    if (j + 1 == k) {
      total += lift_count(G, l, j, mu, req);
      return;
    }
    for (auto& H : lift_layer(G, l, j, mu, req)) proc(H, j + 1);
  };
  for (auto& a : seeds) proc(from_compact(g, l, a.data()), 1);
  return total;
}

// ------------------------------------------------------------ l = p

BigInt count_m_scheme_p(int g, int64_t p, int k, const ResiduePolynomial& f) {
  if (g != 1) fail(Errc::resource_limit, "count_m_scheme_p: only g = 1 is within budget");
  int64_t m = ipow(p, k);
  if (m > 1000) fail(Errc::resource_limit, "count_m_scheme_p: p^k too large");
  if (f.modulus() != m || f.degree() != 2) fail(Errc::invalid_argument, "count_m_scheme_p: bad f");
  if (f.coeff(0) != mod(p, m)) fail(Errc::invalid_argument, "count_m_scheme_p: constant term must be p");
  if (f.coeff(1) % p == 0) fail(Errc::invalid_argument, "count_m_scheme_p: f not ordinary");
  int64_t t = mod(-f.coeff(1), m);
  // A Omega A^T = det(A) Omega for 2x2, so the scheme is det = p, trace = t
  BigInt n = 0;
  for (int64_t a = 0; a < m; ++a) {
    int64_t d = mod(t - a, m);
    for (int64_t b = 0; b < m; ++b)
      for (int64_t c = 0; c < m; ++c)
        if (mod(a * d - b * c - p, m) == 0) n += 1;
  }
  return n;
}

// ------------------------------------------------------------ projections (g = 1)

namespace {

// Target for 2x2 matrices M in a shifted variable z: the charpoly is
// z^2 + c1 z + c0 with c1 known mod l^A and c0 known mod l^B (B <= A).
struct Target {
  int64_t c1, c0;
  int A, B;
};

// # M mod l^k whose charpoly matches the target to precisions min(k, A), min(k, B).
BigInt count_matching(const Target& T, int64_t l, int k) {
  if (k <= 0) return 1;
  int a = std::clamp(T.A, 0, k), b = std::clamp(T.B, 0, k);
  int64_t m = ipow(l, k), la = ipow(l, a), lb = ipow(l, b);
  BigInt s = 0;
  for (int64_t t = mod(-T.c1, la); t < m; t += la)
    for (int64_t d = mod(T.c0, lb); d < m; d += lb) s += count_trace_gl2(d, l, k, t);
  return s;
}

// Move the target to z' = z - lambda and divide out l; false if no scalar
// matrix lambda + l N can satisfy it.
bool descend(const Target& T, int64_t l, int64_t lambda, Target& out) {
  int64_t c1 = 2 * lambda + T.c1;
  int64_t c0 = lambda * lambda + lambda * T.c1 + T.c0;
  int n1 = std::min(1, std::max(T.A, 0)), n0 = std::min(2, std::max(T.B, 0));
  if (mod(c1, ipow(l, n1)) != 0 || mod(c0, ipow(l, n0)) != 0) return false;
  out.A = T.A - 1;
  out.B = T.B - 2;
  out.c1 = out.A > 0 ? mod(c1, ipow(l, T.A)) / l : 0;
  out.c0 = out.B > 0 ? mod(c0, ipow(l, T.B)) / (l * l) : 0;
  return true;
}

BigInt count_scalar(const Target& T, int64_t l, int k) {
  BigInt s = 0;
  for (int64_t lam = 0; lam < l; ++lam) {
    Target D;
    if (descend(T, l, lam, D)) s += count_matching(D, l, k - 1);
  }
  return s;
}

// # M mod l^k that extend to an l-adic matrix meeting the target. Points that
// are not scalar mod l are smooth for (trace, det), so they always extend.
BigInt images(const Target& T, int64_t l, int k) {
  if (k <= 0) return 1;
  Target Tk{T.c1, T.c0, std::min(T.A, k), std::min(T.B, k)};
  BigInt s = count_matching(Tk, l, k) - count_scalar(Tk, l, k);
  for (int64_t lam = 0; lam < l; ++lam) {
    Target D;
    if (descend(T, l, lam, D)) s += images(D, l, k - 1);
  }
  return s;
}

void check_quadratic(const IntPolynomial& f) {
  if (f.degree() != 2 || f.lc() != 1) fail(Errc::invalid_argument, "projection_count_gl2: f must be monic quadratic");
  if (discriminant(f) == 0) fail(Errc::invalid_argument, "projection_count_gl2: zero discriminant");
}

}  // namespace

BigInt projection_count_gl2_fixed(const IntPolynomial& f, int64_t l, int k, int slack) {
  check_quadratic(f);
  if (k < 1 || slack < 0) fail(Errc::invalid_argument, "projection_count_gl2: bad k or slack");
  int K = k + slack;
  int64_t M = ipow(l, K);
  Target T{mod((f.coeff(1) % M).convert_to<int64_t>(), M), mod((f.coeff(0) % M).convert_to<int64_t>(), M), K, K};
  return images(T, l, k);
}

// Exact image of the l-adic fiber: descend with the integer polynomial itself.
BigInt projection_count_gl2_exact(const IntPolynomial& f, int64_t l, int k) {
  check_quadratic(f);
  if (k <= 0) return 1;
  BigInt c1 = f.coeff(1), c0 = f.coeff(0);
  int64_t m = ipow(l, k);
  Target T{mod((c1 % m).convert_to<int64_t>(), m), mod((c0 % m).convert_to<int64_t>(), m), k, k};
  BigInt s = count_matching(T, l, k) - count_scalar(T, l, k);
  for (int64_t lam = 0; lam < l; ++lam) {
    BigInt e1 = 2 * lam + c1, e0 = BigInt(lam) * lam + lam * c1 + c0;
    if (e1 % l != 0 || e0 % (l * l) != 0) continue;
    s += projection_count_gl2_exact(IntPolynomial({e0 / (l * l), e1 / l, BigInt(1)}), l, k - 1);
  }
  return s;
}
ProjectionResult projection_count_gl2(const IntPolynomial& f, int64_t l, int k, int slack, int max_slack) {
  if (slack < 0) {
    BigInt disc = discriminant(f);
    slack = 2 * valuation(disc, l) + 1;
  }
  ProjectionResult r;
  for (;;) {
    BigInt a = projection_count_gl2_fixed(f, l, k, slack);
    BigInt b = projection_count_gl2_fixed(f, l, k, slack + 1);
    if (a == b) {
      r.count = a;
      r.slack_used = slack;
      r.stable = true;
      return r;
    }
    if (slack >= max_slack) break;
    slack = std::max(1, 2 * slack);
  }
  fail(Errc::needs_more_slack, "projection_count_gl2: count unstable up to max slack");
}

// ------------------------------------------------------------ singular locus

int singularity_order(const ResidueMatrix& G, int64_t l, int k) {
  int N = G.n();
  int best = k;
  for (int i = 0; i < N; ++i)
    for (int j = i; j < N; ++j) {
      int64_t s = a_omega(G, i, j) + a_omega(G, j, i);
      s = mod(s, ipow(l, k));
      if (s == 0) continue;
      best = std::min(best, valuation(s, l));
    }
  return best;
}

std::map<int, BigInt> singular_locus_stats(int g, int64_t p, int64_t l, int k, uint64_t budget) {
  if (k < 1 || k > 2) fail(Errc::unsupported, "singular_locus_stats: k must be 1 or 2");
  int64_t mu = mod(p, ipow(l, k));
  int dim = tangent_dim(g);
  std::map<int, BigInt> out;
  std::vector<std::array<int64_t, 16>> singular;
  uint64_t nonsing = 0;
  enumerate_gsp_mod_l(
      g, l, mu % l,
      [&](const int64_t* A) {
        if (compact_singular(g, l, A)) {
          std::array<int64_t, 16> a{};
          std::copy(A, A + 4 * g * g, a.begin());
          singular.push_back(a);
        } else {
          ++nonsing;
        }
      },
      budget);
  out[0] = BigInt(nonsing) * pow(BigInt(l), dim * (k - 1));
  if (k == 1) {
    out[1] = singular.size();
    return out;
  }
  if (BigInt(singular.size()) * pow(BigInt(l), dim) > budget)
    fail(Errc::resource_limit, "singular_locus_stats: lift budget exceeded");
  LiftRequest free_req;
  for (auto& a : singular) {
    ResidueMatrix G = from_compact(g, l, a.data());
    for (auto& H : lift_layer(G, l, 1, mu, free_req)) out[singularity_order(H, l, 2)] += 1;
  }
  return out;
}

int64_t disc_mod(const std::vector<int64_t>& f, int64_t modulus) {
  std::vector<BigInt> c(f.begin(), f.end());
  BigInt d = discriminant(IntPolynomial(c)) % modulus;
  if (d < 0) d += modulus;
  return d.convert_to<int64_t>();
}

Rational disc_vanishing_fraction(int g, int64_t p, int64_t l, int k, uint64_t budget) {
  int64_t m = ipow(l, k);
  BigInt hit = 0, total = 0;
  if (g == 1) {
    for (int64_t t = 0; t < m; ++t) {
      BigInt c = count_trace_gl2(p, l, k, t);
      total += c;
      if (mod(t * t - 4 * p, m) == 0) hit += c;
    }
    return Rational(hit, total);
  }
  CountTable T = charpoly_table(g, p, l, k, budget);
  for (auto& [f, c] : T.counts) {
    total += c;
    if (disc_mod(f, m) == 0) hit += c;
  }
  return Rational(hit, total);
}

}  // namespace wl
