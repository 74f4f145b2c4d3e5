#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "weil_poly.hpp"

namespace wl {

struct AngleVector {
  std::vector<double> theta;  // nondecreasing, in [0, pi]
};

// prod_{i<j} (x_i - x_j)^2 prod_i (4 - x_i^2) for x_i = 2 cos(theta_i).
double weyl_discriminant(const std::vector<double>& x);

// Density on the ordered simplex 0 <= theta_1 <= ... <= theta_g <= pi.
double weyl_density(const AngleVector& a);

struct DensityValue {
  double value = 0;
  double std_error = 0;  // Monte Carlo only
  double bandwidth = 0;  // Monte Carlo only
  std::string method;
};

struct MonteCarloConfig {
  uint64_t seed = 20240611;
  int partitions = 4;
  uint64_t samples = 400000;
};

// Trace density of USp_2g Haar measure.
DensityValue st_density_ex(int g, double x, const MonteCarloConfig& mc = {});
double st_density(int g, double x);

struct DensityCurve {
  std::vector<double> x, y;
  std::string method;
  double step = 0;
  double error_estimate = 0;
};
DensityCurve st_density_curve(int g, int points, const MonteCarloConfig& mc = {});

struct SelfCheck {
  int g = 1;
  double weyl_mass = 0;        // total mass of weyl_density on the ordered simplex
  double st_integral = 0;      // integral of st_density over [-2g, 2g]
  double second_moment = 0;    // integral of x^2 st_density
  double error = 0;            // quadrature error or Monte Carlo standard error
  std::string method;
};
SelfCheck sato_tate_self_check(int g, const MonteCarloConfig& mc = {});

// Angles of the region point b (roots 2 cos(theta) of g_b^+), ascending theta.
AngleVector region_angles(const RegionPoint& b);
double mu_region_density(int g, const RegionPoint& b);

struct JacobianCheck {
  double analytic = 0;
  double finite_difference = 0;
};
// Coefficients b(theta) of prod (x^2 - 2 cos(theta_i) x + 1).
std::vector<double> angles_to_region(const std::vector<double>& theta);
JacobianCheck jacobian_identity_check(int g, const AngleVector& a);

struct VolumeBracket {
  double lower = 0;
  double upper = 0;
  uint64_t grid_points = 0;
};
VolumeBracket region_volume(int g, double grid_step);

// Adaptive Simpson on [a, b] with absolute tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth = 40);

}  // namespace wl
