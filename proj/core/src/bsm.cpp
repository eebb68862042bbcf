#include "walklab/bsm.hpp"

#include <cmath>
#include <sstream>

#include "walklab/errors.hpp"
#include "walklab/numerics.hpp"

namespace walklab {

double log_Z_of(double w) { return -0.5 * w - 0.125; }

double Z_of(double w) { return std::exp(log_Z_of(w)); }

double log_z_density(double y) {
  if (!(y > 0.0)) throw ValidationError("z_density: y must be positive");
  const double l = std::log(y) + 0.125;
  return 0.5 * std::log(2.0 / kPi) - std::log(y) - 2.0 * l * l;
}

double z_density(double y) { return std::exp(log_z_density(y)); }

namespace {

double gh_expectation(const std::function<double(double)>& V, double y, int order) {
  const auto& rule = gauss_hermite_rule(order);
  double s = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    if (rule.weights[i] == 0.0) continue;
    const double v = V(y * Z_of(rule.nodes[i]));
    if (!std::isfinite(v)) {
      std::ostringstream os;
      os << "v_bsm: V not finite at quadrature node w=" << rule.nodes[i];
      throw NumericError(os.str());
    }
    s += rule.weights[i] * v;
  }
  return s;
}

}  // namespace

double v_bsm(const std::function<double(double)>& V, double y, int quad_order,
             bool check_divergence) {
  if (!(y > 0.0)) throw ValidationError("v_bsm: y must be positive");
  const double base = gh_expectation(V, y, quad_order);
  if (!check_divergence) return base;
  const double refined = gh_expectation(V, y, 2 * quad_order);
  if (std::abs(refined - base) > 1e-6 * std::abs(base) && std::abs(refined) > std::abs(base)) {
    std::ostringstream os;
    os.precision(17);
    os << "v_bsm: quadrature grows under refinement at y=" << y << " (order " << quad_order
       << ": " << base << ", order " << 2 * quad_order << ": " << refined << ")";
    throw DivergenceError(os.str());
  }
  return base;
}

double v_bsm(const UtilitySpec& v_spec, double y, int quad_order, bool check_divergence) {
  return v_bsm([&](double z) { return v_spec.V(z); }, y, quad_order, check_divergence);
}

double log_phi(double alpha) { return (alpha * alpha + alpha) / 8.0; }

double phi(double alpha) { return std::exp(log_phi(alpha)); }

double log_v_bsm_power(double alpha, double beta, double y) {
  if (!(alpha > 0.0 && beta > 0.0 && y > 0.0)) {
    throw ValidationError("v_bsm_power: alpha, beta, y must be positive");
  }
  return std::log(beta) + log_phi(alpha) - alpha * std::log(y);
}

double v_bsm_power(double alpha, double beta, double y) {
  const double lv = log_v_bsm_power(alpha, beta, y);
  if (std::abs(lv) >= kMaxLinearLog) {
    throw NumericError("v_bsm_power: value exp(" + std::to_string(lv) +
                       ") outside linear range; use log_v_bsm_power");
  }
  return std::exp(lv);
}

double u_bsm_power(double alpha, double beta, double x) {
  return std::exp(alpha / 8.0) * power_utility(alpha, beta, x);
}

bool ValueCurve::consistent(double slack) const {
  if (args.size() != values.size()) return false;
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (!(args[i] > args[i - 1])) return false;
  }
  for (std::size_t i = 1; i + 1 < args.size(); ++i) {
    const double d1 = (values[i] - values[i - 1]) / (args[i] - args[i - 1]);
    const double d2 = (values[i + 1] - values[i]) / (args[i + 1] - args[i]);
    if (convexity_sign * (d2 - d1) < -slack) return false;
  }
  return true;
}

ValueCurve sample_v_bsm(const UtilitySpec& v_spec, const std::vector<double>& ys,
                        int quad_order) {
  ValueCurve c{"y", ys, {}, {}, +1, "v_bsm"};
  for (double y : ys) {
    const double v = v_bsm(v_spec, y, quad_order);
    c.values.push_back(v);
    c.log_values.push_back(v > 0.0 ? std::log(v) : std::nan(""));
  }
  return c;
}

}  // namespace walklab
