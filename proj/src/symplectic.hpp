#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <vector>

#include "algebra.hpp"

namespace wl {

constexpr int kMaxN = 6;  // 2g for g <= 3
constexpr uint64_t kDefaultBudget = 2000000000ULL;

// 2g x 2g matrix over Z/m, row-major, entries in [0, m).
struct ResidueMatrix {
  int g = 1;
  int64_t m = 1;
  std::array<int64_t, kMaxN * kMaxN> e{};

  int n() const { return 2 * g; }
  int64_t& at(int i, int j) { return e[i * kMaxN + j]; }
  int64_t at(int i, int j) const { return e[i * kMaxN + j]; }

  int64_t trace() const;
  // Returns mult if A Omega A^T = mult Omega (mod m), else -1.
  int64_t multiplier() const;
  // Monic characteristic polynomial det(x - A) mod m, lowest degree first.
  std::vector<int64_t> charpoly() const;
  ResidueMatrix operator*(const ResidueMatrix& o) const;
};

struct TangentVector {
  int g = 1;
  // blocks of v = [[A, B], [C, D]] over Z/l with B = B^T, C = C^T, D = -A^T
  std::vector<int64_t> A, B, C, D;
  ResidueMatrix to_matrix(int64_t l) const;
};

// Basis of the fixed-multiplier tangent space L: v = Omega S, S symmetric.
std::vector<ResidueMatrix> tangent_basis(int g, int64_t l);
int tangent_dim(int g);
TangentVector tangent_blocks(const ResidueMatrix& v);

struct CountTable {
  int g = 1;
  int64_t mult = 0;  // the fixed multiplier (p)
  int64_t l = 0;
  int k = 1;
  std::map<std::vector<int64_t>, BigInt> counts;  // key: trace residue or charpoly residue
  BigInt total = 0;
};

struct EnumStats {
  uint64_t visited = 0;
};

BigInt group_order(int g, int64_t l, int k);
BigInt sp_order(int g, int64_t l);
// #{gamma in GSp_2g(Z/l^k) : mult = mu} for a unit mu.
BigInt fixed_mult_order(int g, int64_t l, int k);

int thread_count();

// Visits every element of GSp_2g(F_l) with multiplier mu (or all multipliers
// when mu < 0) exactly once. The visitor receives row-major 2g x 2g entries.
using RawVisitor = std::function<void(const int64_t* A)>;
uint64_t enumerate_gsp_mod_l(int g, int64_t l, int64_t mu, const RawVisitor& visit,
                             uint64_t budget = kDefaultBudget);

// Linear lift layer: given gamma mod l^j (j >= 1) with multiplier mu mod l^j,
// the canonical lift mod l^{j+1} with multiplier mu mod l^{j+1}.
ResidueMatrix canonical_lift(const ResidueMatrix& gamma, int64_t l, int j, int64_t mu);

enum class LiftTarget { free, trace, charpoly };

struct LiftRequest {
  LiftTarget target = LiftTarget::free;
  int64_t trace = 0;                 // residue mod l^{j+1} for target=trace
  std::vector<int64_t> charpoly;     // residue mod l^{j+1} for target=charpoly
};

// All lifts of gamma (mod l^j, j >= 1) to mod l^{j+1} that keep mult = mu and
// meet the target. Empty when the linear system is inconsistent.
std::vector<ResidueMatrix> lift_layer(const ResidueMatrix& gamma, int64_t l, int j, int64_t mu,
                                      const LiftRequest& req);
// Number of lifts without materializing them.
BigInt lift_count(const ResidueMatrix& gamma, int64_t l, int j, int64_t mu, const LiftRequest& req);

// Trace counts N(t) for every t mod l^k (vector indexed by t), mult = p.
std::vector<BigInt> count_by_trace_table(int g, int64_t p, int64_t l, int k,
                                         uint64_t budget = kDefaultBudget);
BigInt count_by_trace(int g, int64_t p, int64_t l, int k, int64_t t, uint64_t budget = kDefaultBudget);

// g = 1 closed route: sum over a of #{(b,c) : bc = a(t-a) - mu mod l^k}.
BigInt count_trace_gl2(int64_t mu, int64_t l, int k, int64_t t);
BigInt count_product_solutions(int64_t r, int64_t l, int k);

// Charpoly counts mod l^k; f has 2g+1 coefficients, monic, lowest first.
BigInt count_by_charpoly(int g, int64_t p, int64_t l, int k, const ResiduePolynomial& f,
                         uint64_t budget = kDefaultBudget);
// Histogram over charpoly residues mod l^k (k in {1,2}) for every gamma.
CountTable charpoly_table(int g, int64_t p, int64_t l, int k, uint64_t budget = kDefaultBudget);

// l = p: matrices mod p^k with A Omega A^T = p Omega and charpoly f (g = 1).
BigInt count_m_scheme_p(int g, int64_t p, int k, const ResiduePolynomial& f);

struct ProjectionResult {
  BigInt count;
  int slack_used = 0;
  bool stable = false;
};
// #pi_k of l-adic matrices with charpoly exactly f (g = 1), by slack escalation.
ProjectionResult projection_count_gl2(const IntPolynomial& f, int64_t l, int k, int slack = -1,
                                      int max_slack = 24);
BigInt projection_count_gl2_fixed(const IntPolynomial& f, int64_t l, int k, int slack);
// Limit of the slack family, computed by exact descent on scalar residues.
BigInt projection_count_gl2_exact(const IntPolynomial& f, int64_t l, int k);

// Singularity order of gamma mod l^k: largest m <= k with l^m | Tr(gamma v) for all v in L.
int singularity_order(const ResidueMatrix& gamma, int64_t l, int k);
std::map<int, BigInt> singular_locus_stats(int g, int64_t p, int64_t l, int k,
                                           uint64_t budget = kDefaultBudget);
Rational disc_vanishing_fraction(int g, int64_t p, int64_t l, int k, uint64_t budget = kDefaultBudget);

// Discriminant of a residue polynomial's integer lift, mod l^k.
int64_t disc_mod(const std::vector<int64_t>& f, int64_t modulus);

}  // namespace wl
