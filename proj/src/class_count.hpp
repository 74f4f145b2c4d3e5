#pragma once

#include <cstdint>
#include <vector>

#include "algebra.hpp"

namespace wl {

// Number of gamma in GSp_2g(F_l) with multiplier p mod l and characteristic
// polynomial f mod l, from centralizer orders of the semisimple classes.
// Odd l only; f monic of degree 2g over F_l.
BigInt class_count(int g, int64_t p, int64_t l, const ResiduePolynomial& f);

// N(t) for t mod l, summed over all admissible characteristic polynomials.
std::vector<BigInt> class_trace_table(int g, int64_t p, int64_t l);

}  // namespace wl
