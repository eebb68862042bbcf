#pragma once

#include <functional>
#include <string>
#include <vector>

#include "walklab/conjugate.hpp"

namespace walklab {

// V0 = 1 / z_density: sqrt(pi/2) * y * exp(2 (ln y + 1/8)^2).
double V0(double y);
double log_V0(double y);
double dV0(double y);
double d2V0(double y);

// Stationary point of V0 located numerically (golden section on log V0 over
// log y); analytically exp(-3/8).
double measured_V0_stationary_point();

// Largest z <= z_max (searched on a decreasing grid) such that V0 is checked
// decreasing and convex on a fine log grid of (z * 1e-8, z].
double default_z0(double z_max = 0.1);

enum class Divergence { kDiverges, kConverges, kInconclusive };
std::string to_string(Divergence d);

// Truncated dual integrals I(eps) = int_eps^{z0} V(y z) f(z) dz for a
// decreasing list of eps.
struct DivergenceScan {
  double y;
  double z0;
  std::vector<double> epsilons;
  std::vector<double> truncated_integrals;
  Divergence classification;
  // Least-squares slope of log I against log(1/eps) over the deepest half of
  // the scan.
  double slope;
};

inline constexpr double kDivergenceSlope = 0.05;
inline constexpr double kCauchyTol = 1e-6;

// Default eps list: 10^-1 ... 10^-10, then every tenth decade down to 10^-300.
std::vector<double> default_epsilons();

// log V for the scan integrand; must be defined on (0, y * z0].
using LogDualFn = std::function<double(double)>;

DivergenceScan divergence_scan(double y, double z0, const std::vector<double>& epsilons);
DivergenceScan divergence_scan(const LogDualFn& log_V, double y, double z0,
                               const std::vector<double>& epsilons);

// Lacunary series: v(y) = sum_k y^(-2^k+1) / (2^k (2^k - 1)) and
// v'(y) = -sum_k y^(-2^k) / 2^k. +inf when the partial sums pass 1e300.
double biii_v(double y);
double biii_vprime(double y);

// log V^{y0}(y) = log V((e^{-1/4} / y0) * y): moves the divergence pole of V
// from e^{-1/4} to y0.
LogDualFn shift_V(LogDualFn log_V, double y0);
// Same rescaling for a UtilitySpec conjugate.
std::function<double(double)> shift_V(const UtilitySpec& v_spec, double y0);

}  // namespace walklab
