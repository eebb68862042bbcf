#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace walklab {

struct Atom {
  double value;
  double prob;
};

// A finite-support innovation with mean zero and unit variance. The
// constructor validates; it never rescales (see standardize()).
class FiniteRV {
 public:
  // Sorts atoms by value. Throws ValidationError if the atoms are not a valid
  // standardized law: fewer than 2 atoms, duplicate values, probabilities
  // outside (0, 1], mass not 1 (1e-12), mean not 0 (1e-10), variance not 1
  // (1e-10).
  explicit FiniteRV(std::vector<Atom> atoms);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  double min_value() const { return atoms_.front().value; }
  double max_value() const { return atoms_.back().value; }
  // K := max |value|.
  double support_bound() const;

  static FiniteRV symmetric_binomial();
  // {(-1/2, 4/5), (2, 1/5)}: positive third moment.
  static FiniteRV asymmetric_binomial();
  // {(-sqrt 2, 1/4), (0, 1/2), (sqrt 2, 1/4)}.
  static FiniteRV trinomial();

 private:
  std::vector<Atom> atoms_;
};

// Affinely rescales arbitrary atoms (positive probabilities summing to one,
// non-degenerate) to mean 0 and variance 1.
FiniteRV standardize(std::vector<Atom> atoms);

struct Moments {
  double mean;
  double variance;
  double third;
};

Moments moments(const FiniteRV& rv);

// L(lambda) = E[exp(lambda * zeta)]. May overflow to +inf; use log_laplace.
double laplace(const FiniteRV& rv, double lambda);
double log_laplace(const FiniteRV& rv, double lambda);

// Laplace transform of the standard normal, exp(lambda^2 / 2), and its log.
double gaussian_laplace(double lambda);
double log_gaussian_laplace(double lambda);

struct LatticePoint {
  double w;
  double prob;
};

// Exact law of omega(1) = sum_{j<=n} zeta_j / sqrt(n): strictly increasing
// support with positive masses.
class LatticeDistribution {
 public:
  LatticeDistribution(int n, std::vector<LatticePoint> points);

  int n() const { return n_; }
  const std::vector<LatticePoint>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

  double total_mass() const;
  double mean() const;
  double second_moment() const;
  // |total_mass - 1|, recorded so callers can see accumulated rounding.
  double mass_residual() const { return std::abs(total_mass() - 1.0); }

 private:
  int n_;
  std::vector<LatticePoint> points_;
};

inline constexpr double kDefaultMergeTol = 1e-9;
inline constexpr std::size_t kDefaultLatticeCap = 2'000'000;

// Iterated convolution of n copies of zeta / sqrt(n). Support points closer
// than merge_tol * max(1, |w|) are merged (mass added, value mass-averaged).
// Throws NumericError if an intermediate lattice exceeds max_points.
LatticeDistribution terminal_distribution(const FiniteRV& rv, int n,
                                          double merge_tol = kDefaultMergeTol,
                                          std::size_t max_points = kDefaultLatticeCap);

// sum_i prob_i * g(w_i). Throws NumericError naming the atom if g is not
// finite there.
double lattice_expect(const LatticeDistribution& dist,
                      const std::function<double(double)>& g);

// log E[g] from log g: log-sum-exp of log prob_i + log_g(w_i). log_g may
// return -inf (g = 0) but not NaN or +inf.
double lattice_log_expect(const LatticeDistribution& dist,
                          const std::function<double(double)>& log_g);

}  // namespace walklab
