#pragma once

#include <cstdint>
#include <vector>

#include "algebra.hpp"

namespace wl {

// h: Z^g -> Q, periodic with period w in every variable.
struct PeriodicFunction {
  int64_t w = 1;
  int g = 1;
  std::vector<Rational> table;  // index sum a_i w^i over [0, w)^g
  bool nonnegative = true;

  Rational at(const std::vector<int64_t>& a) const;
  Rational average() const;
  void validate() const;
};

PeriodicFunction constant_function(int g, const Rational& c);

// (1/N^g) sum over origin + [0, N)^g of prod h_i(a). Periods must be pairwise coprime.
Rational box_average_product(const std::vector<PeriodicFunction>& h, int64_t N,
                             const std::vector<int64_t>& origin);
Rational product_of_averages(const std::vector<PeriodicFunction>& h);

// m functions on Z^g with periods drawn from `periods`, values k/10 with 0 <= k < 10.
std::vector<PeriodicFunction> random_family(uint64_t seed, int m, int g, const std::vector<int64_t>& periods);
std::vector<PeriodicFunction> standard_random_family(uint64_t seed = 20240611);

struct ScalingRow {
  int64_t N = 0;
  Rational box, product;
  double error = 0;
};
struct ScalingResult {
  std::vector<ScalingRow> rows;
  double slope = 0;  // least squares of log error against log N; 0 if all errors vanish
  bool all_zero = false;
};
ScalingResult error_scaling(const std::vector<PeriodicFunction>& h, const std::vector<int64_t>& Ns);
// N = 30 * 2^j + 7, j = 0..count-1
std::vector<int64_t> standard_sizes(int count);

}  // namespace wl
