#include "walklab/esscher.hpp"

#include <algorithm>
#include <cmath>

#include "walklab/bsm.hpp"
#include "walklab/errors.hpp"
#include "walklab/numerics.hpp"

namespace walklab {

double esscher_residual(const FiniteRV& rv, int n, double a) {
  const double h = 1.0 / std::sqrt(static_cast<double>(n));
  return log_laplace(rv, (1.0 - a) * h) - log_laplace(rv, -a * h);
}

EsscherParams solve_esscher(const FiniteRV& rv, int n) {
  if (n < 1) throw ValidationError("solve_esscher: n must be >= 1");
  auto g = [&](double a) { return esscher_residual(rv, n, a); };
  // g is decreasing: positive far left, negative far right.
  const Interval br = expand_sign_bracket(g, -1.0, 2.0, 200);
  const double a = bisect(g, br.lo, br.hi, 1e-13);
  const double h = 1.0 / std::sqrt(static_cast<double>(n));
  return {n, a, n * log_laplace(rv, -a * h)};
}

double refine_esscher_newton(const FiniteRV& rv, int n, double a0, int steps) {
  const double h = 1.0 / std::sqrt(static_cast<double>(n));
  // d/da log L(t) = -h * L'(t)/L(t) for t = (1-a)h or -a h.
  auto tilted_mean = [&](double t) {
    LogSumAccumulator num_pos, num_neg, den;
    for (const auto& at : rv.atoms()) {
      const double l = std::log(at.prob) + t * at.value;
      den.add(l);
      if (at.value > 0) num_pos.add(l + std::log(at.value));
      if (at.value < 0) num_neg.add(l + std::log(-at.value));
    }
    const double d = den.value();
    return std::exp(num_pos.value() - d) - std::exp(num_neg.value() - d);
  };
  double a = a0;
  for (int i = 0; i < steps; ++i) {
    const double g = esscher_residual(rv, n, a);
    const double dg = -h * tilted_mean((1.0 - a) * h) + h * tilted_mean(-a * h);
    if (dg == 0.0) break;
    a -= g / dg;
  }
  return a;
}

double asymptotic_a(const FiniteRV& rv, int n) {
  return 0.5 + moments(rv).third / (24.0 * std::sqrt(static_cast<double>(n)));
}

double log_Z_n_of(const EsscherParams& p, double w) { return -p.a * w - p.b; }

double Z_n_of(const EsscherParams& p, double w) { return std::exp(log_Z_n_of(p, w)); }

EsscherIdentities check_esscher(const EsscherParams& p, const LatticeDistribution& dist) {
  return {lattice_expect(dist, [&](double w) { return Z_n_of(p, w); }),
          lattice_expect(dist, [&](double w) { return std::exp(log_Z_n_of(p, w) + w); })};
}

RatioBound ratio_bound_C(const FiniteRV& rv, const std::vector<int>& n_list, double merge_tol) {
  if (n_list.empty()) throw ValidationError("ratio_bound_C: empty n list");
  const double K = rv.support_bound();
  double max_gap = 0.0;
  double max_env = 0.0;
  int argmax = n_list.front();
  for (int n : n_list) {
    const auto p = solve_esscher(rv, n);
    const auto dist = terminal_distribution(rv, n, merge_tol);
    for (const auto& pt : dist.points()) {
      const double gap = std::abs(log_Z_n_of(p, pt.w) - log_Z_of(pt.w));
      if (gap > max_gap) {
        max_gap = gap;
        argmax = n;
      }
    }
    const double env = std::abs(p.a - 0.5) * K * std::sqrt(static_cast<double>(n)) +
                       std::abs(p.b - 0.125);
    max_env = std::max(max_env, env);
  }
  return {std::exp(max_gap), std::exp(max_env), argmax};
}

}  // namespace walklab
