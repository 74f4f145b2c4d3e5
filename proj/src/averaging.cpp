#include "averaging.hpp"

#include <cmath>
#include <numeric>
#include <random>

namespace wl {

namespace {

int64_t table_index(const std::vector<int64_t>& a, int64_t w) {
  int64_t idx = 0, scale = 1;
  for (int64_t ai : a) {
    idx += mod(ai, w) * scale;
    scale *= w;
  }
  return idx;
}

}  // namespace

Rational PeriodicFunction::at(const std::vector<int64_t>& a) const {
  if (static_cast<int>(a.size()) != g) fail(Errc::invalid_argument, "PeriodicFunction::at: wrong dimension");
  return table[table_index(a, w)];
}

Rational PeriodicFunction::average() const {
  Rational s = 0;
  for (const auto& v : table) s += v;
  return s / Rational(table.size());
}

void PeriodicFunction::validate() const {
  if (w < 1 || g < 1) fail(Errc::invalid_argument, "PeriodicFunction: period and dimension must be positive");
  if (static_cast<int64_t>(table.size()) != ipow(w, g))
    fail(Errc::invalid_argument, "PeriodicFunction: table size must be w^g");
  if (nonnegative)
    for (const auto& v : table)
      if (v < 0) fail(Errc::invalid_argument, "PeriodicFunction: negative value");
}

PeriodicFunction constant_function(int g, const Rational& c) {
  PeriodicFunction h;
  h.g = g;
  h.table = {c};
  h.nonnegative = c >= 0;
  return h;
}

Rational product_of_averages(const std::vector<PeriodicFunction>& h) {
  Rational z = 1;
  for (const auto& f : h) z *= f.average();
  return z;
}

Rational box_average_product(const std::vector<PeriodicFunction>& h, int64_t N,
                             const std::vector<int64_t>& origin) {
  if (h.empty()) fail(Errc::invalid_argument, "box_average_product: no functions");
  if (N < 1) fail(Errc::invalid_argument, "box_average_product: N must be positive");
  int g = h[0].g;
  if (static_cast<int>(origin.size()) != g) fail(Errc::invalid_argument, "box_average_product: origin dimension");
  int64_t W = 1;
  for (size_t i = 0; i < h.size(); ++i) {
    h[i].validate();
    if (h[i].g != g) fail(Errc::invalid_argument, "box_average_product: mixed dimensions");
    for (size_t j = 0; j < i; ++j)
      if (std::gcd(h[i].w, h[j].w) != 1) fail(Errc::invalid_argument, "box_average_product: periods not coprime");
    W *= h[i].w;
  }
  if (ipow(W, g) > 50'000'000) fail(Errc::resource_limit, "box_average_product: combined period too large");
  // The product is W-periodic: weight each residue class by how often the box hits it.
  std::vector<std::vector<int64_t>> cnt(g, std::vector<int64_t>(W));
  for (int i = 0; i < g; ++i)
    for (int64_t r = 0; r < W; ++r) {
      int64_t first = origin[i] + mod(r - origin[i], W);
      cnt[i][r] = first >= origin[i] + N ? 0 : (origin[i] + N - 1 - first) / W + 1;
    }
  Rational sum = 0;
  std::vector<int64_t> a(g, 0);
  int64_t cells = ipow(W, g);
  for (int64_t c = 0; c < cells; ++c) {
    int64_t y = c, mult = 1;
    for (int i = 0; i < g; ++i) {
      a[i] = y % W;
      y /= W;
      mult *= cnt[i][a[i]];
    }
    if (mult == 0) continue;
    Rational v = mult;
    for (const auto& f : h) {
      v *= f.at(a);
      if (v == 0) break;
    }
    sum += v;
  }
  return sum / Rational(boost::multiprecision::pow(BigInt(N), g));
}

std::vector<PeriodicFunction> random_family(uint64_t seed, int m, int g, const std::vector<int64_t>& periods) {
  if (periods.size() < static_cast<size_t>(m)) fail(Errc::invalid_argument, "random_family: need one period per function");
  std::mt19937_64 rng(seed);
  std::vector<PeriodicFunction> out;
  for (int i = 0; i < m; ++i) {
    PeriodicFunction h;
    h.w = periods[i];
    h.g = g;
    int64_t n = ipow(h.w, g);
    for (int64_t j = 0; j < n; ++j) h.table.emplace_back(static_cast<int64_t>(rng() % 10), 10);
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<PeriodicFunction> standard_random_family(uint64_t seed) {
  return random_family(seed, 3, 2, {2, 3, 5});
}

std::vector<int64_t> standard_sizes(int count) {
  std::vector<int64_t> Ns;
  for (int j = 0; j < count; ++j) Ns.push_back(30 * (int64_t{1} << j) + 7);
  return Ns;
}

ScalingResult error_scaling(const std::vector<PeriodicFunction>& h, const std::vector<int64_t>& Ns) {
  ScalingResult res;
  Rational z = product_of_averages(h);
  std::vector<int64_t> origin(h.at(0).g, 0);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  res.all_zero = true;
  for (int64_t N : Ns) {
    ScalingRow row;
    row.N = N;
    row.box = box_average_product(h, N, origin);
    row.product = z;
    Rational d = row.box - z;
    row.error = std::fabs(static_cast<double>(d));
    if (d != 0) {
      res.all_zero = false;
      double x = std::log(static_cast<double>(N)), y = std::log(row.error);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++n;
    }
    res.rows.push_back(row);
  }
  if (n >= 2) res.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return res;
}

}  // namespace wl
