#pragma once

#include <functional>
#include <string>
#include <vector>

#include "walklab/conjugate.hpp"

namespace walklab {

// Pricing kernel of the continuous-time economy as a function of the terminal
// log-price w = omega(1): Z(w) = exp(-w/2 - 1/8).
double Z_of(double w);
double log_Z_of(double w);

// Density of Z under the physical measure (Z is lognormal with log-mean -1/8
// and log-variance 1/4).
double z_density(double y);
double log_z_density(double y);

inline constexpr int kDefaultQuadOrder = 200;

// v(y) = E[V(y Z)] with w ~ N(0, 1), by Gauss-Hermite quadrature in w.
// When check_divergence is set, the value is recomputed at twice the order;
// if it moved by more than 1e-6 relative and grew, DivergenceError is thrown.
double v_bsm(const std::function<double(double)>& V, double y,
             int quad_order = kDefaultQuadOrder, bool check_divergence = true);
double v_bsm(const UtilitySpec& v_spec, double y, int quad_order = kDefaultQuadOrder,
             bool check_divergence = true);

// phi(alpha) = exp((alpha^2 + alpha) / 8) and its log.
double phi(double alpha);
double log_phi(double alpha);

// Closed-form dual value of V = beta * y^(-alpha): beta * phi(alpha) * y^(-alpha).
double log_v_bsm_power(double alpha, double beta, double y);
// Linear form; throws NumericError when the log exceeds the linear range.
double v_bsm_power(double alpha, double beta, double y);

// Closed-form primal value exp(alpha/8) * U_{alpha,beta}(x).
double u_bsm_power(double alpha, double beta, double x);

// Sampled value function with the convexity sign its source guarantees.
struct ValueCurve {
  std::string arg_name;  // "x" or "y"
  std::vector<double> args;
  std::vector<double> values;
  std::vector<double> log_values;
  int convexity_sign;  // +1 convex, -1 concave
  std::string source;

  // Checks strictly increasing arguments and the expected sign of every
  // second divided difference (with the given absolute slack).
  bool consistent(double slack = 1e-9) const;
};

ValueCurve sample_v_bsm(const UtilitySpec& v_spec, const std::vector<double>& ys,
                        int quad_order = kDefaultQuadOrder);

}  // namespace walklab
