#include "sato_tate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <tuple>

namespace wl {

namespace {

constexpr double kPi = std::numbers::pi;

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6 * (fa + 4 * flm + fm);
  double right = (b - m) / 6 * (fm + 4 * frm + fb);
  double delta = left + right - whole;
  if (depth <= 0 || std::fabs(delta) <= 15 * tol) return left + right + delta / 15;
  return simpson_rec(f, a, m, fa, flm, fm, left, tol / 2, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, tol / 2, depth - 1);
}

// Largest prod_{i<j} (x_i - x_j)^2 over [-2, 2]^g.
double vandermonde_bound(int g) {
  switch (g) {
    case 1: return 1;
    case 2: return 16;
    case 3: return 256;
    default: fail(Errc::unsupported, "Monte Carlo trace sampling supports g <= 3");
  }
}

// Traces of Haar-random USp_2g elements: independent semicircle proposals,
// accepted with probability proportional to the squared Vandermonde.
std::vector<double> sample_traces(int g, const MonteCarloConfig& mc) {
  if (mc.partitions < 1 || mc.samples < 1) fail(Errc::invalid_argument, "Monte Carlo: empty configuration");
  double bound = vandermonde_bound(g);
  std::vector<double> out;
  out.reserve(mc.samples);
  for (int part = 0; part < mc.partitions; ++part) {
    std::seed_seq ss{static_cast<uint32_t>(mc.seed), static_cast<uint32_t>(mc.seed >> 32),
                     static_cast<uint32_t>(part)};
    std::mt19937_64 rng(ss);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    uint64_t want = mc.samples / mc.partitions + (static_cast<uint64_t>(part) < mc.samples % mc.partitions);
    std::vector<double> x(g);
    for (uint64_t got = 0; got < want;) {
      for (int i = 0; i < g; ++i) x[i] = 2 * std::sqrt(U(rng)) * std::cos(2 * kPi * U(rng));
      double v = 1;
      for (int i = 0; i < g; ++i)
        for (int j = i + 1; j < g; ++j) v *= (x[i] - x[j]) * (x[i] - x[j]);
      if (U(rng) * bound >= v) continue;
      double t = 0;
      for (double xi : x) t += xi;
      out.push_back(t);
      ++got;
    }
  }
  return out;
}

const std::vector<double>& cached_traces(int g, const MonteCarloConfig& mc) {
  static std::mutex mtx;
  static std::map<std::tuple<int, uint64_t, int, uint64_t>, std::vector<double>> cache;
  std::lock_guard<std::mutex> lk(mtx);
  auto key = std::make_tuple(g, mc.seed, mc.partitions, mc.samples);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, sample_traces(g, mc)).first;
  return it->second;
}

double bandwidth(const std::vector<double>& s) {
  double mean = 0, sq = 0;
  for (double v : s) mean += v;
  mean /= s.size();
  for (double v : s) sq += (v - mean) * (v - mean);
  double sd = std::sqrt(sq / (s.size() - 1));
  return 1.06 * sd * std::pow(static_cast<double>(s.size()), -0.2);
}

double det(std::vector<std::vector<double>> m) {
  int n = static_cast<int>(m.size());
  double d = 1;
  for (int c = 0; c < n; ++c) {
    int piv = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(m[r][c]) > std::fabs(m[piv][c])) piv = r;
    if (m[piv][c] == 0) return 0;
    if (piv != c) {
      std::swap(m[piv], m[c]);
      d = -d;
    }
    d *= m[c][c];
    for (int r = c + 1; r < n; ++r) {
      double f = m[r][c] / m[c][c];
      for (int k = c; k < n; ++k) m[r][k] -= f * m[c][k];
    }
  }
  return d;
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol, int max_depth) {
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6 * (fa + 4 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

double weyl_discriminant(const std::vector<double>& x) {
  double d = 1;
  for (size_t i = 0; i < x.size(); ++i) {
    d *= 4 - x[i] * x[i];
    for (size_t j = i + 1; j < x.size(); ++j) d *= (x[i] - x[j]) * (x[i] - x[j]);
  }
  return d;
}

double weyl_density(const AngleVector& a) {
  const auto& t = a.theta;
  if (t.empty()) fail(Errc::invalid_argument, "weyl_density: no angles");
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] < 0 || t[i] > kPi) fail(Errc::invalid_argument, "weyl_density: angle outside [0, pi]");
    if (i > 0 && t[i] < t[i - 1]) fail(Errc::invalid_argument, "weyl_density: angles must be ordered");
  }
  double d = 1;
  for (size_t i = 0; i < t.size(); ++i) {
    double s = std::sin(t[i]);
    d *= 2 / kPi * s * s;
    for (size_t j = i + 1; j < t.size(); ++j) {
      double diff = 2 * std::cos(t[i]) - 2 * std::cos(t[j]);
      d *= diff * diff;
    }
  }
  return d;
}

DensityValue st_density_ex(int g, double x, const MonteCarloConfig& mc) {
  if (g < 1) fail(Errc::invalid_argument, "st_density: g must be positive");
  if (!(std::fabs(x) <= 2 * g)) fail(Errc::invalid_argument, "st_density: x outside [-2g, 2g]");
  DensityValue r;
  if (g == 1) {
    r.value = std::sqrt(std::max(0.0, 4 - x * x)) / (2 * kPi);
    r.method = "closed-form";
    return r;
  }
  if (g == 2) {
    r.method = "adaptive-simpson";
    double lo = std::max(-2.0, x - 2), hi = std::min(2.0, x + 2);
    if (hi <= lo) return r;
    double mid = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
    // u = mid + h cos(phi) absorbs the square-root endpoints
    auto f = [&](double phi) {
      double u = mid + h * std::cos(phi);
      double a = std::max(0.0, 4 - u * u), b = std::max(0.0, 4 - (x - u) * (x - u));
      double w = 2 * u - x;
      return std::sqrt(a * b) * w * w * h * std::sin(phi);
    };
    r.value = adaptive_simpson(f, 0, kPi, 1e-10) / (8 * kPi * kPi);
    return r;
  }
  const auto& s = cached_traces(g, mc);
  double h = bandwidth(s);
  double acc = 0;
  for (double v : s) {
    double z = (x - v) / h;
    acc += std::exp(-0.5 * z * z);
  }
  r.value = acc / (s.size() * h * std::sqrt(2 * kPi));
  r.bandwidth = h;
  r.std_error = std::sqrt(r.value / (2 * std::sqrt(kPi)) / (s.size() * h));
  r.method = "monte-carlo-kde";
  return r;
}

double st_density(int g, double x) { return st_density_ex(g, x).value; }

DensityCurve st_density_curve(int g, int points, const MonteCarloConfig& mc) {
  if (points < 2) fail(Errc::invalid_argument, "st_density_curve: need at least two points");
  DensityCurve c;
  c.step = 4.0 * g / (points - 1);
  for (int i = 0; i < points; ++i) {
    double x = -2.0 * g + i * c.step;
    if (i == points - 1) x = 2.0 * g;
    DensityValue v = st_density_ex(g, x, mc);
    c.x.push_back(x);
    c.y.push_back(v.value);
    c.method = v.method;
    c.error_estimate = std::max(c.error_estimate, v.std_error);
  }
  if (g == 2) c.error_estimate = 1e-10;
  return c;
}

SelfCheck sato_tate_self_check(int g, const MonteCarloConfig& mc) {
  SelfCheck r;
  r.g = g;
  if (g == 1) {
    r.weyl_mass = adaptive_simpson([](double t) { return weyl_density({{t}}); }, 0, kPi, 1e-12);
    // substitution x = 2 cos(phi) keeps the quadrature smooth at the endpoints
    auto sub = [](int pw) {
      return adaptive_simpson(
          [pw](double phi) {
            double x = 2 * std::cos(phi);
            return std::pow(x, pw) * st_density(1, x) * 2 * std::sin(phi);
          },
          0, kPi, 1e-12);
    };
    r.st_integral = sub(0);
    r.second_moment = sub(2);
    r.error = 1e-10;
    r.method = "adaptive-simpson";
    return r;
  }
  if (g == 2) {
    r.weyl_mass = adaptive_simpson(
        [](double t2) {
          return adaptive_simpson([t2](double t1) { return weyl_density({{t1, t2}}); }, 0, t2, 1e-11);
        },
        0, kPi, 1e-10);
    // x = 4 cos(phi) is smooth enough for the pushforward density
    auto sub = [](int pw) {
      return adaptive_simpson(
          [pw](double phi) {
            double x = 4 * std::cos(phi);
            return std::pow(x, pw) * st_density(2, x) * 4 * std::sin(phi);
          },
          0, kPi, 1e-9);
    };
    r.st_integral = sub(0);
    r.second_moment = sub(2);
    r.error = 1e-8;
    r.method = "adaptive-simpson";
    return r;
  }
  const auto& s = cached_traces(g, mc);
  double m2 = 0, m4 = 0;
  for (double v : s) {
    m2 += v * v;
    m4 += v * v * v * v;
  }
  double n = static_cast<double>(s.size());
  m2 /= n;
  m4 /= n;
  double se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  // the kernel estimate integrates in closed form: each Gaussian's mass inside [-2g, 2g]
  double h = bandwidth(s), integ = 0;
  for (double v : s)
    integ += 0.5 * (std::erf((2 * g - v) / (h * std::sqrt(2.0))) - std::erf((-2 * g - v) / (h * std::sqrt(2.0))));
  r.st_integral = integ / n;
  r.second_moment = m2;
  r.weyl_mass = 1;  // the sampler is normalized by construction
  r.error = se;
  r.method = "monte-carlo";
  return r;
}

AngleVector region_angles(const RegionPoint& b) {
  RatPoly f = region_plus_poly(b);
  BigInt l = 1;
  for (const auto& c : f) l = boost::multiprecision::lcm(l, denominator(c));
  std::vector<BigInt> v;
  for (const auto& c : f) v.push_back(numerator(c) * (l / denominator(c)));
  IntPolynomial F(v);
  if (F.degree() != static_cast<int>(b.b.size())) fail(Errc::internal, "region_angles: bad degree");
  if (squarefree_part(F).degree() != F.degree()) fail(Errc::invalid_argument, "region point has a repeated angle");
  auto roots = real_roots(F);
  if (static_cast<int>(roots.size()) != F.degree()) fail(Errc::invalid_argument, "region point outside R_g");
  AngleVector a;
  for (auto r : roots) {
    if (!(r > -2 && r < 2)) fail(Errc::invalid_argument, "region point outside the interior of R_g");
    a.theta.push_back(std::acos(static_cast<double>(r) / 2));
  }
  std::sort(a.theta.begin(), a.theta.end());
  return a;
}

double mu_region_density(int g, const RegionPoint& b) {
  if (static_cast<int>(b.b.size()) != g) fail(Errc::invalid_argument, "mu_region_density: dimension mismatch");
  if (!membership_R_g(b)) fail(Errc::invalid_argument, "mu_region_density: point outside R_g");
  AngleVector a = region_angles(b);
  std::vector<double> x;
  for (double t : a.theta) x.push_back(2 * std::cos(t));
  return std::sqrt(std::fabs(weyl_discriminant(x))) / std::pow(2 * kPi, g);
}

std::vector<double> angles_to_region(const std::vector<double>& theta) {
  std::vector<double> p{1};  // highest degree first
  for (double t : theta) {
    std::vector<double> q(p.size() + 2, 0);
    double c = -2 * std::cos(t);
    for (size_t i = 0; i < p.size(); ++i) {
      q[i] += p[i];
      q[i + 1] += c * p[i];
      q[i + 2] += p[i];
    }
    p = std::move(q);
  }
  return std::vector<double>(p.begin() + 1, p.begin() + 1 + theta.size());
}

JacobianCheck jacobian_identity_check(int g, const AngleVector& a) {
  const auto& t = a.theta;
  if (static_cast<int>(t.size()) != g) fail(Errc::invalid_argument, "jacobian_identity_check: dimension mismatch");
  for (int i = 0; i < g; ++i) {
    if (!(t[i] > 0 && t[i] < kPi)) fail(Errc::invalid_argument, "jacobian_identity_check: angles must be interior");
    for (int j = i + 1; j < g; ++j)
      if (std::fabs(t[i] - t[j]) < 1e-4) fail(Errc::ill_conditioned, "jacobian_identity_check: angles too close");
  }
  JacobianCheck r;
  double an = 1;
  for (int i = 0; i < g; ++i) {
    an *= 2 * std::sin(t[i]);
    for (int j = i + 1; j < g; ++j) an *= 2 * std::fabs(std::cos(t[i]) - std::cos(t[j]));
  }
  r.analytic = an;
  double h = 1e-6;
  std::vector<std::vector<double>> J(g, std::vector<double>(g));
  for (int j = 0; j < g; ++j) {
    auto tp = t, tm = t;
    tp[j] += h;
    tm[j] -= h;
    auto bp = angles_to_region(tp), bm = angles_to_region(tm);
    for (int i = 0; i < g; ++i) J[i][j] = (bp[i] - bm[i]) / (2 * h);
  }
  r.finite_difference = std::fabs(det(J));
  return r;
}

VolumeBracket region_volume(int g, double grid_step) {
  if (!(grid_step > 0)) fail(Errc::invalid_argument, "region_volume: step must be positive");
  if (g < 1 || g > 2) fail(Errc::unsupported, "region_volume: g must be 1 or 2");
  // grid in exact rationals: step rounded to a multiple of 1e-6
  int64_t num = std::llround(grid_step * 1e6);
  if (num <= 0) fail(Errc::invalid_argument, "region_volume: step below 1e-6");
  Rational step(num, 1000000);
  double s = static_cast<double>(num) / 1e6;
  // bounding box |b_i| <= C(2g, i), centred on the known range of b_2
  std::vector<std::pair<double, double>> box = g == 1 ? std::vector<std::pair<double, double>>{{-2, 2}}
                                                      : std::vector<std::pair<double, double>>{{-4, 4}, {-2, 6}};
  std::vector<int64_t> lo(g), cnt(g);
  for (int i = 0; i < g; ++i) {
    lo[i] = static_cast<int64_t>(std::floor(box[i].first / s)) - 1;
    cnt[i] = static_cast<int64_t>(std::ceil(box[i].second / s)) + 1 - lo[i] + 1;
  }
  VolumeBracket r;
  if (g == 1) {
    std::vector<char> in(cnt[0]);
    for (int64_t i = 0; i < cnt[0]; ++i) in[i] = membership_R_g({{step * (lo[0] + i)}});
    r.grid_points = cnt[0];
    for (int64_t i = 0; i + 1 < cnt[0]; ++i) {
      if (in[i] && in[i + 1]) r.lower += s;
      if (in[i] || in[i + 1]) r.upper += s;
    }
    return r;
  }
  std::vector<char> prev(cnt[1]), cur(cnt[1]);
  for (int64_t i = 0; i < cnt[0]; ++i) {
    Rational b1 = step * (lo[0] + i);
    for (int64_t j = 0; j < cnt[1]; ++j) cur[j] = membership_R_g({{b1, step * (lo[1] + j)}});
    if (i > 0)
      for (int64_t j = 0; j + 1 < cnt[1]; ++j) {
        int c = prev[j] + prev[j + 1] + cur[j] + cur[j + 1];
        if (c == 4) r.lower += s * s;
        if (c > 0) r.upper += s * s;
      }
    std::swap(prev, cur);
  }
  r.grid_points = static_cast<uint64_t>(cnt[0] * cnt[1]);
  return r;
}

}  // namespace wl
