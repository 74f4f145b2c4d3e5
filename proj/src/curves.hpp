#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "algebra.hpp"

namespace wl {

struct TraceDistribution {
  int64_t p = 0;
  int genus = 1;
  std::map<int64_t, Rational> mass;  // t -> weighted count
  Rational total = 0;
  uint64_t models = 0;               // nonsingular models enumerated
  BigInt group_order = 0;            // order of the acting group used as denominator
};

// Weighted count of y^2 = x^3 + ax + b by Frobenius trace, p >= 5.
TraceDistribution elliptic_trace_distribution(int64_t p);

// Weighted count of y^2 = f(x, z) with f a squarefree binary sextic, 3 <= p <= 13.
TraceDistribution genus2_trace_distribution(int64_t p);

// Weighted count of elliptic curves with trace t (ordinary t only).
Rational isogeny_class_mass(int64_t p, int64_t t);

// CSV with columns p, genus, t, mass_num, mass_den, normalized_mass.
std::string distribution_csv(const TraceDistribution& d);

}  // namespace wl
