#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace walklab {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLn2 = 0.69314718055994530942;

// Largest |log| for which a value is materialized in linear space.
inline constexpr double kMaxLinearLog = 700.0;

// log(sum_i exp(terms[i])); -inf for an empty span or all -inf terms.
double log_sum_exp(std::span<const double> terms);

// log(sum_i exp(log_weights[i] + log_values[i])) with the same conventions.
double log_sum_exp(std::span<const double> log_weights,
                   std::span<const double> log_values);

// Running accumulator for log-space sums.
class LogSumAccumulator {
 public:
  void add(double log_term);
  double value() const;
  bool empty() const { return max_ == -std::numeric_limits<double>::infinity(); }

 private:
  double max_ = -std::numeric_limits<double>::infinity();
  double scaled_sum_ = 0.0;
};

// exp(log_value) if |log_value| < kMaxLinearLog, otherwise +inf / 0 according
// to the sign. Callers that need the huge value must stay in log space.
double materialize(double log_value);

struct Interval {
  double lo;
  double hi;
};

struct ScalarOptimum {
  double arg;
  double value;
  int iterations;
};

// Maximizes a unimodal function on [lo, hi] by golden-section search until the
// bracket is narrower than tol. Returns the midpoint of the final bracket.
ScalarOptimum golden_section_max(const std::function<double(double)>& f,
                                 double lo, double hi, double tol);

// Minimizing counterpart.
ScalarOptimum golden_section_min(const std::function<double(double)>& f,
                                 double lo, double hi, double tol);

// Root of a continuous f with f(lo), f(hi) of opposite signs. Stops when the
// bracket width is <= tol or an exact zero is hit.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double tol, int max_iter = 400);

// Expands [lo, hi] outward by doubling its width until f changes sign.
// Throws NumericError after max_doublings.
Interval expand_sign_bracket(const std::function<double(double)>& f, double lo,
                             double hi, int max_doublings = 200);

// Finds a triple a < b < c with f(b) <= min(f(a), f(c)) by walking downhill
// from start with doubling steps. Throws UnboundedError after max_doublings.
Interval bracket_minimum(const std::function<double(double)>& f, double start,
                         double step, int max_doublings);

// n points geometrically spaced on [lo, hi], both ends included.
std::vector<double> geometric_grid(double lo, double hi, std::size_t n);

// n points evenly spaced on [lo, hi], both ends included.
std::vector<double> linear_grid(double lo, double hi, std::size_t n);

// Nodes and weights for E[g(W)], W ~ N(0, 1): sum_i weight[i] * g(node[i]).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Probabilists' Gauss-Hermite rule of the given order. Tables are computed
// once per order and shared.
const GaussHermiteRule& gauss_hermite_rule(int order);

}  // namespace walklab
