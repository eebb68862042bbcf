#include "walklab/dp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>

#include "walklab/discrete_duals.hpp"
#include "walklab/errors.hpp"
#include "walklab/esscher.hpp"

namespace walklab {

namespace {

constexpr double kThetaTol = 1e-12;
constexpr double kBoundaryMargin = 1e-9;
constexpr double kMaxExitMass = 1e-3;

std::vector<double> step_returns(const FiniteRV& rv, int n) {
  const double h = 1.0 / std::sqrt(static_cast<double>(n));
  std::vector<double> r;
  r.reserve(rv.size());
  for (const auto& a : rv.atoms()) r.push_back(std::expm1(a.value * h));
  return r;
}

Interval search_interval(const FiniteRV& rv, int n) {
  const Interval b = no_bankruptcy_interval(rv, n);
  return {b.lo + kBoundaryMargin * std::max(1.0, std::abs(b.lo)),
          b.hi - kBoundaryMargin * std::max(1.0, std::abs(b.hi))};
}

double second_difference(const std::function<double(double)>& f, double x, double h) {
  return f(x + h) - 2.0 * f(x) + f(x - h);
}

// Values on the wealth grid are interpolated linearly in log wealth after a
// sign-preserving log when U keeps one sign; power utilities are then exact.
enum class Transform { kLinear, kLogPositive, kLogNegative };

struct GridInterpolator {
  double t0;
  double dt;
  Transform mode;
  std::vector<double> stored;

  double forward(double v) const {
    switch (mode) {
      case Transform::kLogPositive: return std::log(v);
      case Transform::kLogNegative: return std::log(-v);
      default: return v;
    }
  }
  double backward(double s) const {
    switch (mode) {
      case Transform::kLogPositive: return std::exp(s);
      case Transform::kLogNegative: return -std::exp(s);
      default: return s;
    }
  }
  void assign(const std::vector<double>& values) {
    stored.resize(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) stored[i] = forward(values[i]);
  }
  double operator()(double x) const {
    const double s = (std::log(x) - t0) / dt;
    const std::size_t last = stored.size() - 1;
    std::size_t i;
    if (s <= 0.0) {
      i = 0;
    } else if (s >= static_cast<double>(last)) {
      i = last - 1;
    } else {
      i = static_cast<std::size_t>(s);
      if (i >= last) i = last - 1;
    }
    const double frac = s - static_cast<double>(i);
    return backward(stored[i] + frac * (stored[i + 1] - stored[i]));
  }
};

}  // namespace

Interval no_bankruptcy_interval(const FiniteRV& rv, int n) {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  for (double r : step_returns(rv, n)) {
    if (r > 0.0) lo = std::max(lo, -1.0 / r);
    if (r < 0.0) hi = std::min(hi, -1.0 / r);
  }
  return {lo, hi};
}

double crra_step_objective(const FiniteRV& rv, int n, double gamma, double theta) {
  const auto r = step_returns(rv, n);
  double s = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) {
    s += rv.atoms()[i].prob * std::pow(1.0 + theta * r[i], gamma);
  }
  return s;
}

DPResult crra_dp(const FiniteRV& rv, int n, double gamma) {
  if (n < 1) throw ValidationError("crra_dp: n must be >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) throw ValidationError("crra_dp: gamma must lie in (0, 1)");
  const Interval box = search_interval(rv, n);
  auto f = [&](double th) { return crra_step_objective(rv, n, gamma, th); };
  const auto opt = golden_section_max(f, box.lo, box.hi, kThetaTol);
  const double log_growth = n * std::log(opt.value);

  DPResult res;
  res.n = n;
  res.family = "crra";
  res.value_at = [gamma, log_growth](double x) {
    return std::pow(x, gamma) / gamma * std::exp(log_growth);
  };
  res.theta_star = opt.arg;
  const double h = 1e-4 * std::min(box.hi - opt.arg, opt.arg - box.lo);
  res.max_objective_curvature = h > 0 ? second_difference(f, opt.arg, h) : 0.0;
  res.mass_outside_grid = 0.0;
  res.boundary_warning = false;
  return res;
}

DPResult general_dp(const FiniteRV& rv, int n, const UtilitySpec& u, const WealthGridSpec& grid) {
  if (n < 1) throw ValidationError("general_dp: n must be >= 1");
  if (grid.points < 3) throw ValidationError("general_dp: wealth grid needs >= 3 points");
  if (!(grid.anchor > 0.0 && grid.decades > 0.0)) {
    throw ValidationError("general_dp: wealth grid anchor and span must be positive");
  }
  const std::size_t N = grid.points;
  const double span = grid.decades * std::log(10.0);
  const double t0 = std::log(grid.anchor) - span;
  const double dt = 2.0 * span / static_cast<double>(N - 1);
  std::vector<double> xs(N);
  for (std::size_t j = 0; j < N; ++j) xs[j] = std::exp(t0 + dt * static_cast<double>(j));
  xs[(N - 1) / 2] = grid.anchor;

  const auto r = step_returns(rv, n);
  const auto& atoms = rv.atoms();
  const Interval box = search_interval(rv, n);

  std::vector<double> values(N);
  bool all_pos = true, all_neg = true;
  for (std::size_t j = 0; j < N; ++j) {
    values[j] = u.U(xs[j]);
    all_pos = all_pos && values[j] > 0.0;
    all_neg = all_neg && values[j] < 0.0;
  }
  GridInterpolator interp{t0, dt,
                          all_pos   ? Transform::kLogPositive
                          : all_neg ? Transform::kLogNegative
                                    : Transform::kLinear,
                          {}};

  DPResult res;
  res.n = n;
  res.family = u.family_name();
  res.theta_star = std::numeric_limits<double>::quiet_NaN();
  res.wealth_grid = xs;
  res.theta_policy.assign(static_cast<std::size_t>(n), std::vector<double>(N, 0.0));
  res.max_objective_curvature = -std::numeric_limits<double>::infinity();

  std::vector<double> next(N);
  for (int k = n - 1; k >= 0; --k) {
    const bool terminal = (k == n - 1);
    interp.assign(values);
    auto cont = [&](double x) { return terminal ? u.U(x) : interp(x); };
    auto& policy = res.theta_policy[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < N; ++j) {
      const double x = xs[j];
      auto f = [&](double th) {
        double s = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) s += atoms[i].prob * cont(x * (1.0 + th * r[i]));
        return s;
      };
      auto opt = golden_section_max(f, box.lo, box.hi, kThetaTol);
      if (!terminal) {
        const double warm = res.theta_policy[static_cast<std::size_t>(k + 1)][j];
        const double fw = f(warm);
        if (std::abs(opt.value - fw) <= 1e-14 * std::max(1.0, std::abs(fw))) {
          opt.arg = warm;
          opt.value = std::max(opt.value, fw);
        }
      }
      policy[j] = opt.arg;
      next[j] = opt.value;
      if (j == (N - 1) / 2) {
        const double h = 1e-4 * std::min(box.hi - opt.arg, opt.arg - box.lo);
        if (h > 0) {
          res.max_objective_curvature =
              std::max(res.max_objective_curvature, second_difference(f, opt.arg, h));
        }
      }
    }
    values.swap(next);
  }

  // Forward pass of the wealth distribution from the anchor under the policy.
  std::vector<double> mass(N, 0.0), nmass(N);
  mass[(N - 1) / 2] = 1.0;
  double outside = 0.0;
  for (int k = 0; k < n; ++k) {
    std::fill(nmass.begin(), nmass.end(), 0.0);
    const auto& policy = res.theta_policy[static_cast<std::size_t>(k)];
    for (std::size_t j = 0; j < N; ++j) {
      if (mass[j] == 0.0) continue;
      for (std::size_t i = 0; i < r.size(); ++i) {
        const double m = mass[j] * atoms[i].prob;
        const double s = (std::log(xs[j] * (1.0 + policy[j] * r[i])) - t0) / dt;
        if (s < 0.0 || s > static_cast<double>(N - 1)) {
          outside += m;
          continue;
        }
        const auto lo = static_cast<std::size_t>(s);
        const double frac = s - static_cast<double>(lo);
        nmass[lo] += m * (1.0 - frac);
        if (lo + 1 < N) nmass[lo + 1] += m * frac;
      }
    }
    mass.swap(nmass);
  }
  res.mass_outside_grid = outside;
  res.boundary_warning = outside > 0.0;
  if (outside > kMaxExitMass) {
    throw NumericError("general_dp: " + std::to_string(outside) +
                       " of the probability mass leaves the wealth grid; widen the grid");
  }

  interp.assign(values);
  res.value_at = [interp](double x) { return interp(x); };
  return res;
}

double binomial_complete_u(const FiniteRV& rv, int n, const UtilitySpec& u, double x) {
  if (rv.size() != 2) {
    throw ValidationError("binomial_complete_u: needs a 2-atom innovation; with more atoms the "
                          "dual value is only an upper bound (use verify_relaxation)");
  }
  if (!(x > 0.0)) throw ValidationError("binomial_complete_u: x must be positive");
  const auto dist = terminal_distribution(rv, n);
  const auto p = solve_esscher(rv, n);
  auto log_budget = [&](double t) {
    const double y = std::exp(t);
    LogSumAccumulator acc;
    for (const auto& pt : dist.points()) {
      const double z = Z_n_of(p, pt.w);
      acc.add(std::log(pt.prob) + std::log(z) + std::log(u.I(y * z)));
    }
    return acc.value();
  };
  const double target = std::log(x);
  auto h = [&](double t) { return log_budget(t) - target; };
  const Interval br = expand_sign_bracket(h, -1.0, 1.0, 200);
  const double t = bisect(h, br.lo, br.hi, 1e-15);
  const double y = std::exp(t);
  double value = 0.0;
  for (const auto& pt : dist.points()) value += pt.prob * u.U(u.I(y * Z_n_of(p, pt.w)));
  return value;
}

RelaxationCheck verify_relaxation(const FiniteRV& rv, int n, const UtilitySpec& u, double x) {
  if (!(x > 0.0)) throw ValidationError("verify_relaxation: x must be positive");
  RelaxationCheck c{};
  if (const auto* crra = std::get_if<Crra>(&u.family()); crra && u.shift() == 0.0) {
    const auto dp = crra_dp(rv, n, crra->gamma);
    c.u_dp = dp.value_at(x);
    c.theta_star = dp.theta_star;
  } else {
    WealthGridSpec g;
    g.anchor = x;
    const auto dp = general_dp(rv, n, u, g);
    c.u_dp = dp.value_at(x);
    c.theta_star = dp.theta_policy.front()[(g.points - 1) / 2];
  }
  c.u_relaxed = u_n_relaxed(rv, n, u, x).value;
  c.ok = c.u_dp <= c.u_relaxed * (1.0 + 1e-8) + 1e-12;
  return c;
}

}  // namespace walklab
