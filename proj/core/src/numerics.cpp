#include "walklab/numerics.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "walklab/errors.hpp"

namespace walklab {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kInvPhi = 0.61803398874989484820;  // 1 / golden ratio
}  // namespace

double log_sum_exp(std::span<const double> terms) {
  if (terms.empty()) return kNegInf;
  const double max_term = *std::max_element(terms.begin(), terms.end());
  if (max_term == kNegInf) return kNegInf;
  if (std::isinf(max_term)) return max_term;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - max_term);
  return max_term + std::log(sum);
}

double log_sum_exp(std::span<const double> log_weights,
                   std::span<const double> log_values) {
  LogSumAccumulator acc;
  const std::size_t n = std::min(log_weights.size(), log_values.size());
  for (std::size_t i = 0; i < n; ++i) acc.add(log_weights[i] + log_values[i]);
  return acc.value();
}

void LogSumAccumulator::add(double log_term) {
  if (log_term == kNegInf) return;
  if (log_term <= max_) {
    scaled_sum_ += std::exp(log_term - max_);
  } else {
    scaled_sum_ = scaled_sum_ * std::exp(max_ - log_term) + 1.0;
    max_ = log_term;
  }
}

double LogSumAccumulator::value() const {
  if (empty()) return kNegInf;
  return max_ + std::log(scaled_sum_);
}

double materialize(double log_value) {
  if (log_value >= kMaxLinearLog) return std::numeric_limits<double>::infinity();
  if (log_value <= -kMaxLinearLog) return 0.0;
  return std::exp(log_value);
}

ScalarOptimum golden_section_max(const std::function<double(double)>& f,
                                 double lo, double hi, double tol) {
  double a = lo;
  double b = hi;
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = f(c);
  double fd = f(d);
  int it = 0;
  while (b - a > tol && it < 1000) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = f(d);
    }
    ++it;
  }
  const double mid = 0.5 * (a + b);
  return {mid, f(mid), it};
}

ScalarOptimum golden_section_min(const std::function<double(double)>& f,
                                 double lo, double hi, double tol) {
  auto r = golden_section_max([&](double x) { return -f(x); }, lo, hi, tol);
  r.value = -r.value;
  return r;
}

double bisect(const std::function<double(double)>& f, double lo, double hi,
              double tol, int max_iter) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo > 0.0) == (fhi > 0.0)) {
    throw NumericError("bisect: no sign change on [" + std::to_string(lo) +
                       ", " + std::to_string(hi) + "]");
  }
  for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0.0) == (flo > 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

Interval expand_sign_bracket(const std::function<double(double)>& f, double lo,
                             double hi, int max_doublings) {
  for (int i = 0; i <= max_doublings; ++i) {
    const double flo = f(lo);
    const double fhi = f(hi);
    if (flo == 0.0 || fhi == 0.0 || (flo > 0.0) != (fhi > 0.0)) return {lo, hi};
    const double width = hi - lo;
    lo -= 0.5 * width;
    hi += 0.5 * width;
  }
  throw NumericError("bracket expansion failed after " +
                     std::to_string(max_doublings) + " doublings; last range [" +
                     std::to_string(lo) + ", " + std::to_string(hi) + "]");
}

Interval bracket_minimum(const std::function<double(double)>& f, double start,
                         double step, int max_doublings) {
  double f0 = f(start);
  double fr = f(start + step);
  double fl = f(start - step);
  if (f0 <= fr && f0 <= fl) return {start - step, start + step};

  // Walk downhill.
  double dir = (fr < fl) ? 1.0 : -1.0;
  double prev = start;
  double cur = start + dir * step;
  double fcur = (dir > 0) ? fr : fl;
  double h = step;
  for (int i = 0; i < max_doublings; ++i) {
    h *= 2.0;
    const double next = cur + dir * h;
    const double fnext = f(next);
    if (!std::isfinite(fnext) && fnext < 0) break;
    if (fnext >= fcur) {
      return dir > 0 ? Interval{prev, next} : Interval{next, prev};
    }
    prev = cur;
    cur = next;
    fcur = fnext;
  }
  throw UnboundedError("objective appears unbounded below: no minimum bracketed "
                       "after " + std::to_string(max_doublings) +
                       " doublings (searched up to " + std::to_string(cur) + ")");
}

std::vector<double> geometric_grid(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double llo = std::log(lo);
  const double step = (std::log(hi) - llo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(llo + step * static_cast<double>(i));
  out.front() = lo;
  out.back() = hi;
  return out;
}

std::vector<double> linear_grid(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) out[i] = lo + step * static_cast<double>(i);
  out.back() = hi;
  return out;
}

namespace {

// Orthonormal Hermite polynomial h_n(z) (weight e^{-z^2}) and h_{n-1}(z),
// carried with a log scale because h_n grows like e^{z^2/2}.
struct HermiteEval {
  double p_n;
  double p_nm1;
  double log_scale;
};

HermiteEval hermite_eval(int n, double z) {
  constexpr double kPiM4 = 0.7511255444649425;  // pi^(-1/4)
  double p1 = kPiM4;
  double p2 = 0.0;
  double log_scale = 0.0;
  for (int j = 0; j < n; ++j) {
    const double p3 = p2;
    p2 = p1;
    p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
    if (std::abs(p1) > 1e150) {
      p1 *= 1e-150;
      p2 *= 1e-150;
      log_scale += 150.0 * std::log(10.0);
    }
  }
  return {p1, p2, log_scale};
}

// Physicists' Gauss-Hermite rule: roots bracketed by sign changes on a grid
// finer than the smallest root gap, polished by safeguarded Newton, then
// rescaled to the standard normal.
GaussHermiteRule compute_gauss_hermite(int order) {
  const int n = order;
  std::vector<double> roots;
  roots.reserve(n);
  if (n % 2 == 1) roots.push_back(0.0);
  const double zmax = std::sqrt(2.0 * n + 1.0) + 1.0;
  const double h = 0.1 / std::sqrt(2.0 * n + 1.0);
  double lo = (n % 2 == 1) ? h : 0.0;
  double f_lo = hermite_eval(n, lo).p_n;
  while (lo < zmax && static_cast<int>(roots.size()) < (n + 1) / 2) {
    const double hi = lo + h;
    const double f_hi = hermite_eval(n, hi).p_n;
    if ((f_lo < 0.0) != (f_hi < 0.0)) {
      double a = lo;
      double b = hi;
      double fa = f_lo;
      double z = 0.5 * (a + b);
      for (int it = 0; it < 200; ++it) {
        const auto e = hermite_eval(n, z);
        const double d = std::sqrt(2.0 * n) * e.p_nm1;
        double next = z - e.p_n / d;
        if ((e.p_n < 0.0) == (fa < 0.0)) {
          a = z;
          fa = e.p_n;
        } else {
          b = z;
        }
        if (!(next > a && next < b)) next = 0.5 * (a + b);
        if (std::abs(next - z) <= 1e-15 * std::max(1.0, std::abs(z)) || b - a <= 1e-15 * b) {
          z = next;
          break;
        }
        z = next;
      }
      roots.push_back(z);
    }
    lo = hi;
    f_lo = f_hi;
  }
  if (static_cast<int>(roots.size()) != (n + 1) / 2) {
    throw NumericError("Gauss-Hermite: found " + std::to_string(roots.size()) + " of " +
                       std::to_string((n + 1) / 2) + " nonnegative roots for order " +
                       std::to_string(n));
  }
  GaussHermiteRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const double log_inv_sqrt_pi = -0.5 * std::log(kPi);
  for (std::size_t k = 0; k < roots.size(); ++k) {
    const double z = roots[k];
    const auto e = hermite_eval(n, z);
    const double d = std::sqrt(2.0 * n) * e.p_nm1;
    const double w = std::exp(std::log(2.0) - 2.0 * (std::log(std::abs(d)) + e.log_scale) + log_inv_sqrt_pi);
    // roots are ascending and nonnegative; mirror them.
    const std::size_t up = static_cast<std::size_t>(n / 2) + k;
    const std::size_t down = static_cast<std::size_t>((n - 1) / 2) - k;
    rule.nodes[up] = std::sqrt(2.0) * z;
    rule.weights[up] = w;
    rule.nodes[down] = -std::sqrt(2.0) * z;
    rule.weights[down] = w;
  }
  return rule;
}

}  // namespace

const GaussHermiteRule& gauss_hermite_rule(int order) {
  if (order < 1) throw ValidationError("Gauss-Hermite order must be >= 1");
  static std::mutex mu;
  static std::map<int, std::unique_ptr<GaussHermiteRule>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[order];
  if (!slot) slot = std::make_unique<GaussHermiteRule>(compute_gauss_hermite(order));
  return *slot;
}

}  // namespace walklab
