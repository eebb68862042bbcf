#include "walklab/prop1b.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>

#include "walklab/bsm.hpp"
#include "walklab/errors.hpp"
#include "walklab/numerics.hpp"

namespace walklab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// log(1e300): partial sums beyond this are reported as infinite.
const double kSentinelLog = 300.0 * std::log(10.0);

using Rule = boost::math::quadrature::gauss<double, 30>;

// log of int_{s0}^{s1} exp(h(s)) ds by 30-point Gauss-Legendre on each of
// `pieces` equal subintervals.
double log_integral(const std::function<double(double)>& h, double s0, double s1, int pieces) {
  LogSumAccumulator acc;
  const auto& x = Rule::abscissa();
  const auto& w = Rule::weights();
  const double width = (s1 - s0) / pieces;
  for (int p = 0; p < pieces; ++p) {
    const double a = s0 + p * width;
    const double half = 0.5 * width;
    const double mid = a + half;
    const double log_half = std::log(half);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] == 0.0) {
        acc.add(std::log(w[i]) + log_half + h(mid));
        continue;
      }
      acc.add(std::log(w[i]) + log_half + h(mid - half * x[i]));
      acc.add(std::log(w[i]) + log_half + h(mid + half * x[i]));
    }
  }
  return acc.value();
}

double slope_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxx > 0 ? sxy / sxx : 0.0;
}

}  // namespace

double log_V0(double y) {
  if (!(y > 0.0)) throw ValidationError("V0: y must be positive");
  const double l = std::log(y) + 0.125;
  return 0.5 * std::log(kPi / 2.0) + std::log(y) + 2.0 * l * l;
}

double V0(double y) { return std::exp(log_V0(y)); }

double dV0(double y) { return V0(y) * (4.0 * std::log(y) + 1.5) / y; }

double d2V0(double y) {
  const double L = std::log(y);
  const double g = 4.0 * L + 1.5;
  return V0(y) / (y * y) * (g * g + 2.5 - 4.0 * L);
}

double measured_V0_stationary_point() {
  const auto opt = golden_section_min([](double t) { return log_V0(std::exp(t)); }, -3.0, 3.0,
                                      1e-12);
  return std::exp(opt.arg);
}

double default_z0(double z_max) {
  if (!(z_max > 0.0)) throw ValidationError("default_z0: z_max must be positive");
  for (double z = z_max; z > 1e-12; z *= 0.9) {
    bool ok = true;
    for (double y : geometric_grid(z * 1e-8, z, 401)) {
      if (!(dV0(y) < 0.0 && d2V0(y) > 0.0)) {
        ok = false;
        break;
      }
    }
    if (ok) return z;
  }
  throw NumericError("default_z0: V0 is not decreasing and convex near 0");
}

std::string to_string(Divergence d) {
  switch (d) {
    case Divergence::kDiverges: return "diverges";
    case Divergence::kConverges: return "converges";
    default: return "inconclusive";
  }
}

std::vector<double> default_epsilons() {
  std::vector<double> out;
  for (int e = 1; e <= 300; e += 1) {
    if (e <= 10 || e % 10 == 0) out.push_back(std::pow(10.0, -e));
  }
  return out;
}

DivergenceScan divergence_scan(double y, double z0, const std::vector<double>& epsilons) {
  return divergence_scan(log_V0, y, z0, epsilons);
}

DivergenceScan divergence_scan(const LogDualFn& log_V, double y, double z0,
                               const std::vector<double>& epsilons) {
  if (!(y > 0.0 && z0 > 0.0)) throw ValidationError("divergence_scan: y and z0 must be positive");
  if (epsilons.size() < 4) throw ValidationError("divergence_scan: need at least 4 epsilons");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    if (!(epsilons[i] > 0.0) || (i > 0 && !(epsilons[i] < epsilons[i - 1]))) {
      throw ValidationError("divergence_scan: epsilons must be positive and decreasing");
    }
  }
  // Integrate in s = ln z: the integrand becomes V(y e^s) f(e^s) e^s.
  auto h = [&](double s) {
    const double z = std::exp(s);
    return log_V(y * z) + log_z_density(z) + s;
  };
  DivergenceScan scan{};
  scan.y = y;
  scan.z0 = z0;
  scan.epsilons = epsilons;
  std::vector<double> log_I;
  LogSumAccumulator acc;
  double upper = std::log(z0);
  for (double eps : epsilons) {
    const double lower = std::log(eps);
    if (lower < upper) {
      const int pieces = std::max(1, static_cast<int>(std::ceil((upper - lower) / 1.0)));
      acc.add(log_integral(h, lower, upper, pieces));
      upper = lower;
    }
    log_I.push_back(acc.value());
    scan.truncated_integrals.push_back(materialize(acc.value()));
  }

  const std::size_t half = epsilons.size() / 2;
  std::vector<double> xs, ys;
  for (std::size_t i = half; i < epsilons.size(); ++i) {
    xs.push_back(-std::log(epsilons[i]));
    ys.push_back(log_I[i]);
  }
  scan.slope = slope_fit(xs, ys);

  bool cauchy = true;
  for (std::size_t i = half + 1; i < epsilons.size(); ++i) {
    // relative increment exp(log_I[i] - log_I[i-1]) - 1
    if (std::expm1(log_I[i] - log_I[i - 1]) >= kCauchyTol) {
      cauchy = false;
      break;
    }
  }
  if (scan.slope > kDivergenceSlope && log_I.back() > log_I[half]) {
    scan.classification = Divergence::kDiverges;
  } else if (cauchy) {
    scan.classification = Divergence::kConverges;
  } else {
    scan.classification = Divergence::kInconclusive;
  }
  return scan;
}

namespace {

// Sums exp(log_term(k)) for k = 1, 2, ...; +inf once the partial sum passes
// 1e300. For y >= 1 the terms fall at least like 4^-k and 64 terms suffice.
template <typename LogTerm>
double biii_sum(double y, LogTerm log_term) {
  if (!(y > 0.0)) throw ValidationError("biii series: y must be positive");
  LogSumAccumulator acc;
  const int k_max = y >= 1.0 ? 64 : 1020;
  for (int k = 1; k <= k_max; ++k) {
    acc.add(log_term(std::ldexp(1.0, k)));
    if (acc.value() > kSentinelLog) return kInf;
  }
  return std::exp(acc.value());
}

}  // namespace

double biii_v(double y) {
  const double ly = std::log(y);
  return biii_sum(y, [ly](double p) { return (1.0 - p) * ly - std::log(p) - std::log(p - 1.0); });
}

double biii_vprime(double y) {
  const double ly = std::log(y);
  return -biii_sum(y, [ly](double p) { return -p * ly - std::log(p); });
}

LogDualFn shift_V(LogDualFn log_V, double y0) {
  if (!(y0 > 0.0)) throw ValidationError("shift_V: y0 must be positive");
  const double scale = std::exp(-0.25) / y0;
  return [log_V = std::move(log_V), scale](double y) { return log_V(scale * y); };
}

std::function<double(double)> shift_V(const UtilitySpec& v_spec, double y0) {
  if (!(y0 > 0.0)) throw ValidationError("shift_V: y0 must be positive");
  const double scale = std::exp(-0.25) / y0;
  return [v_spec, scale](double y) { return v_spec.V(scale * y); };
}

}  // namespace walklab
